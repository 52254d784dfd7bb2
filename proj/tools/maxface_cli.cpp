// maxface: command-line front end for the surface catalog, meshes,
// singular sets, period tables, CMC-1 deformations and verification.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure,
// 4 verification failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "maxface/report.hpp"

namespace fs = std::filesystem;
using namespace maxface;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;
constexpr int exit_acceptance = 4;

struct RunConfig {
    std::string surface = "genus_k";
    std::map<std::string, double> params;
    std::vector<std::string> param_flags;
    std::optional<int> k;
    std::vector<double> t;
    std::string out = ".";
    std::string format;
    double tol_closure = 1e-8;
    double tol_class = 1e-8;
    int jobs = 0;
    std::string config_path;

    // mesh
    std::string grid = "polar";
    double u0 = 0.5, u1 = 2.0;
    std::optional<double> v0, v1;
    int nu = 24, nv = 48;

    // periods
    int k_min = 1, k_max = 4;

    // verify
    std::vector<int> criteria;
    double c_scale = 1.0;

    bool with_ck = false;
    bool cmc1_mesh = false;
};

int resolve_jobs(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("MAXFACE_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
        throw ValidationError("MAXFACE_JOBS must be a positive integer");
    }
    return 1;
}

// Values from the config file fill in everything that was not given as a flag.
void apply_config(RunConfig& cfg, const CLI::App& app) {
    if (cfg.config_path.empty()) return;
    std::ifstream in(cfg.config_path);
    if (!in) throw ValidationError("cannot read config file " + cfg.config_path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
    }
    std::vector<const CLI::App*> scopes{&app};
    for (const CLI::App* sub : app.get_subcommands()) scopes.push_back(sub);
    auto given = [&](const std::string& name) {
        for (const CLI::App* a : scopes)
            if (const CLI::Option* o = a->get_option_no_throw(name); o && o->count() > 0) return true;
        return false;
    };
    if (j.contains("surface") && !given("--surface")) cfg.surface = j["surface"].get<std::string>();
    if (j.contains("params"))
        for (auto& [key, v] : j["params"].items())
            if (!cfg.params.count(key)) cfg.params[key] = v.get<double>();
    if (j.contains("k") && !given("--k")) cfg.k = j["k"].get<int>();
    if (j.contains("t") && !given("--t")) {
        cfg.t.clear();
        if (j["t"].is_array())
            for (const auto& x : j["t"]) cfg.t.push_back(x.get<double>());
        else
            cfg.t.push_back(j["t"].get<double>());
    }
    if (j.contains("out") && !given("--out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("format") && !given("--format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("tol_closure") && !given("--tol-closure")) cfg.tol_closure = j["tol_closure"].get<double>();
    if (j.contains("tol_class") && !given("--tol-class")) cfg.tol_class = j["tol_class"].get<double>();
    if (j.contains("jobs") && !given("--jobs")) cfg.jobs = j["jobs"].get<int>();
}

void parse_params(RunConfig& cfg) {
    for (const auto& p : cfg.param_flags) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("--param expects key=value, got '" + p + "'");
        try {
            std::size_t used = 0;
            const double v = std::stod(p.substr(eq + 1), &used);
            if (used != p.size() - eq - 1) throw std::invalid_argument(p);
            cfg.params[p.substr(0, eq)] = v;
        } catch (const std::invalid_argument&) {
            throw ValidationError("--param value is not a number: '" + p + "'");
        }
    }
}

void validate(const RunConfig& cfg) {
    if (!(cfg.tol_closure > 0) || !(cfg.tol_class > 0)) throw ValidationError("tolerances must be positive");
    if (cfg.jobs < 0) throw ValidationError("--jobs must be positive");
}

fs::path output_dir(const RunConfig& cfg) {
    fs::path p(cfg.out);
    fs::create_directories(p);
    return p;
}

std::map<std::string, double> surface_params(const RunConfig& cfg) {
    auto p = cfg.params;
    if (cfg.k) p["k"] = *cfg.k;
    return p;
}

void write_json(const fs::path& file, const Json& j) {
    std::ofstream os(file);
    if (!os) throw ValidationError("cannot write " + file.string());
    os << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

int cmd_gallery(const RunConfig& cfg) {
    const Json j = catalog_report(cfg.with_ck);
    if (cfg.format == "json") {
        std::cout << j.dump(2) << "\n";
        return exit_ok;
    }
    for (const auto& e : j["surfaces"]) {
        std::cout << e["name"].get<std::string>() << "\n  constraints: " << e["constraints"].get<std::string>()
                  << "\n  data: " << e["anchor"].get<std::string>() << "\n";
        if (e.contains("c_k"))
            for (auto& [k, c] : e["c_k"].items()) std::cout << "  c_" << k << " = " << c.get<double>() << "\n";
    }
    return exit_ok;
}

int cmd_mesh(const RunConfig& cfg) {
    const WeierstrassData d = catalog_get(cfg.surface, surface_params(cfg));
    const std::string fmt = cfg.format.empty() ? "obj" : cfg.format;
    if (fmt != "obj" && fmt != "ply") throw ValidationError("mesh format must be obj or ply");
    GridSpec g;
    if (cfg.grid == "polar")
        g.kind = GridSpec::Kind::Polar;
    else if (cfg.grid == "rect")
        g.kind = GridSpec::Kind::Rect;
    else
        throw ValidationError("--grid must be polar or rect");
    g.u0 = cfg.u0;
    g.u1 = cfg.u1;
    g.nu = cfg.nu;
    g.nv = cfg.nv;
    g.jobs = resolve_jobs(cfg.jobs);
    // Default polar angles sit half a cell off the real axis so that no
    // radial column runs into a branch point on it.
    const bool polar = g.kind == GridSpec::Kind::Polar;
    const double offset = polar ? pi / g.nv : 0.0;
    g.v0 = cfg.v0.value_or(polar ? offset : 0.0);
    g.v1 = cfg.v1.value_or(polar ? 2 * pi - offset : 2.0);
    const fs::path dir = output_dir(cfg);
    std::vector<std::pair<std::string, GridSpec>> parts = {{d.name, g}};
    if (d.name == "genus_k" && polar) {
        // upper half plane: one fundamental piece for the reflections
        GridSpec half = g;
        half.nv = std::max(2, g.nv / 2);
        half.v0 = cfg.v0 ? std::max(*cfg.v0, 0.0) : pi / (2 * half.nv);
        half.v1 = cfg.v1 ? std::min(*cfg.v1, pi) : pi - pi / (2 * half.nv);
        parts.push_back({d.name + "_half", half});
    }
    Json files = Json::array();
    for (const auto& [name, grid] : parts) {
        const Mesh m = mesh_sample(d, grid);
        const fs::path file = dir / (name + "." + fmt);
        std::ofstream os(file);
        if (!os) throw ValidationError("cannot write " + file.string());
        if (fmt == "obj")
            write_obj(os, m, d.name);
        else
            write_ply(os, m);
        files.push_back(file.string());
    }
    std::cout << Json{{"surface", d.name}, {"files", files}}.dump() << "\n";
    return exit_ok;
}

int cmd_singular(const RunConfig& cfg) {
    const WeierstrassData d = catalog_get(cfg.surface, surface_params(cfg));
    const SingularRun r = run_singular(d, default_trace_options(d), cfg.tol_class);
    const fs::path dir = output_dir(cfg);
    const Json j = singular_report(r);
    write_json(dir / (d.name + "_singular.json"), j);
    if (cfg.format.empty() || cfg.format == "csv") {
        for (std::size_t i = 0; i < r.components.size(); ++i) {
            std::ofstream os(dir / (d.name + "_component_" + std::to_string(i) + ".csv"));
            write_component_csv(os, d, r.components[i]);
        }
    }
    std::cout << j["totals"].dump() << "\n";
    return exit_ok;
}

int cmd_periods(const RunConfig& cfg) {
    const Json j = period_report(cfg.k_min, cfg.k_max, cfg.tol_closure);
    if (cfg.format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("%3s %14s %14s %14s %12s %10s\n", "k", "c_k", "rho_k", "Gamma_k", "residual", "oracle");
        for (const auto& r : j["rows"])
            std::printf("%3d %14.10f %14.10f %14.10f %12.3e %10.2e\n", r["k"].get<int>(), r["c"].get<double>(),
                        r["rho"].get<double>(), r["Gamma"].get<double>(), r["closure_residual"].get<double>(),
                        r["oracle_agreement"].get<double>());
    }
    if (cfg.out != ".") write_json(output_dir(cfg) / "periods.json", j);
    for (const auto& r : j["rows"])
        if (!r["closure_pass"].get<bool>() || !r["oracle_agreement_pass"].get<bool>()) return exit_acceptance;
    return exit_ok;
}

int cmd_cmc1(const RunConfig& cfg) {
    const int k = cfg.k.value_or(1);
    const std::vector<double> ts = cfg.t.empty() ? std::vector<double>{0.02} : cfg.t;
    const int jobs = std::max(1, std::min<int>(resolve_jobs(cfg.jobs), int(ts.size())));
    std::vector<Json> cells(ts.size());
    std::vector<std::exception_ptr> errors(ts.size());
    auto work = [&](int w) {
        for (std::size_t i = w; i < ts.size(); i += jobs) {
            try {
                cells[i] = deformation_report(k, ts[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    const Json j = {{"schema_version", report_schema_version}, {"kind", "deformation"}, {"cells", cells}};
    const fs::path dir = output_dir(cfg);
    write_json(dir / ("cmc1_k" + std::to_string(k) + ".json"), j);
    if (cfg.cmc1_mesh || cfg.format == "ply") {
        for (double t : ts) {
            const AdmissiblePair pr = admissible_pair(k, t);
            GridSpec g;
            g.u0 = cfg.u0;
            g.u1 = cfg.u1;
            g.v0 = 0.1;
            g.v1 = pi - 0.1;
            g.nu = cfg.nu;
            g.nv = cfg.nv;
            g.jobs = resolve_jobs(cfg.jobs);
            const DeSitterMesh m = desitter_mesh(pr, construct_iota(k, t).iota1, g);
            char name[64];
            std::snprintf(name, sizeof name, "cmc1_k%d_t%g.ply", k, t);
            std::ofstream os(dir / name);
            write_desitter_ply(os, m);
        }
    }
    bool ok = true;
    for (const auto& c : cells) ok = ok && c["certified"].get<bool>();
    std::cout << j.dump(2) << "\n";
    return ok ? exit_ok : exit_acceptance;
}

int cmd_verify(const RunConfig& cfg) {
    AcceptanceOptions opt;
    opt.c_scale = cfg.c_scale;
    opt.closure_tolerance = cfg.tol_closure;
    std::vector<int> ids = cfg.criteria;
    if (ids.empty())
        for (int i = 1; i <= int(acceptance_criteria().size()); ++i) ids.push_back(i);
    for (int id : ids)
        if (id < 1 || id > int(acceptance_criteria().size())) throw ValidationError("unknown criterion " + std::to_string(id));
    std::vector<CriterionResult> results(ids.size());
    const int jobs = std::max(1, std::min<int>(resolve_jobs(cfg.jobs), int(ids.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < ids.size(); i += jobs) results[i] = run_criterion(ids[i], opt);
        });
    for (auto& th : pool) th.join();
    bool all = true;
    for (const auto& r : results) {
        std::printf("criterion %2d %-45s %s\n", r.id, r.title.c_str(), r.pass() ? "PASS" : "FAIL");
        if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
        for (const auto& c : r.checks)
            if (!c.pass) std::printf("    failed: %s (value %.6g, target %.6g)\n", c.name.c_str(), c.value, c.target);
        all = all && r.pass();
    }
    write_json(output_dir(cfg) / "verify_report.json", verification_report(results, opt));
    return all ? exit_ok : exit_acceptance;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximal surfaces in Minkowski space and their CMC-1 deformations"};
    app.require_subcommand(1);
    RunConfig cfg;

    app.add_option("--config", cfg.config_path, "JSON config file; flags take precedence");
    app.add_option("--out", cfg.out, "Output directory");
    app.add_option("--format", cfg.format, "Output format: obj, ply, json or csv");
    app.add_option("--jobs", cfg.jobs, "Worker threads (default: MAXFACE_JOBS or 1)");
    app.add_option("--tol-closure", cfg.tol_closure, "Closure tolerance for period checks");
    app.add_option("--tol-class", cfg.tol_class, "Tolerance for the cone-like and fold flags");

    auto add_surface = [&](CLI::App* sub) {
        sub->add_option("--surface", cfg.surface, "Catalog surface name");
        sub->add_option("--param", cfg.param_flags, "Surface parameter key=value (repeatable)");
        sub->add_option("--k", cfg.k, "Genus parameter k");
    };

    CLI::App* gallery = app.add_subcommand("gallery", "List the surface catalog");
    gallery->add_flag("--with-ck", cfg.with_ck, "Also solve the closing constants c_k");

    CLI::App* mesh = app.add_subcommand("mesh", "Write an OBJ or PLY mesh of a maxface");
    add_surface(mesh);
    mesh->add_option("--grid", cfg.grid, "polar or rect");
    mesh->add_option("--u0", cfg.u0);
    mesh->add_option("--u1", cfg.u1);
    mesh->add_option("--v0", cfg.v0);
    mesh->add_option("--v1", cfg.v1);
    mesh->add_option("--nu", cfg.nu);
    mesh->add_option("--nv", cfg.nv);

    CLI::App* singular = app.add_subcommand("singular", "Trace and classify the singular set");
    add_surface(singular);

    CLI::App* periods = app.add_subcommand("periods", "Closing constants and period residuals");
    periods->add_option("--k-min", cfg.k_min);
    periods->add_option("--k-max", cfg.k_max);

    CLI::App* cmc1 = app.add_subcommand("cmc1", "CMC-1 deformation report for a (k, t) grid");
    cmc1->add_option("--k", cfg.k, "Genus parameter k");
    cmc1->add_option("--t", cfg.t, "Deformation parameters (repeatable)");
    cmc1->add_flag("--mesh", cfg.cmc1_mesh, "Also write de Sitter PLY meshes");
    cmc1->add_option("--u0", cfg.u0);
    cmc1->add_option("--u1", cfg.u1);
    cmc1->add_option("--nu", cfg.nu);
    cmc1->add_option("--nv", cfg.nv);

    CLI::App* verify = app.add_subcommand("verify", "Run the acceptance suite and write a JSON report");
    verify->add_option("--criterion", cfg.criteria, "Run only these criteria (repeatable)");
    verify->add_option("--perturb-c", cfg.c_scale, "Scale the closing constants in the closure check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        apply_config(cfg, app);
        parse_params(cfg);
        validate(cfg);
        if (gallery->parsed()) return cmd_gallery(cfg);
        if (mesh->parsed()) return cmd_mesh(cfg);
        if (singular->parsed()) return cmd_singular(cfg);
        if (periods->parsed()) return cmd_periods(cfg);
        if (cmc1->parsed()) return cmd_cmc1(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
    } catch (const ValidationError& e) {
        std::cerr << error_document("validation", e.what()).dump() << "\n";
        return exit_validation;
    } catch (const NumericalError& e) {
        std::cerr << error_document("numerical", e.what()).dump() << "\n";
        return exit_numerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << error_document("validation", e.what()).dump() << "\n";
        return exit_validation;
    }
    return exit_validation;
}
