#pragma once

// JSON documents for the command-line front end. Object keys are sorted by
// the JSON library and lists keep a fixed order, so equal inputs give
// byte-identical output.

#include <string>
#include <vector>

#include <json.hpp>

#include "maxface/acceptance.hpp"

namespace maxface {

using Json = nlohmann::json;

inline constexpr int report_schema_version = 1;

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

/// [[a11, a12], [a21, a22]] with entries [re, im].
inline Json to_json(const Mat2& m) {
    return Json::array({Json::array({to_json(m.a11), to_json(m.a12)}), Json::array({to_json(m.a21), to_json(m.a22)})});
}

inline Json to_json(const SurfacePoint& p) { return {{"z", to_json(p.z)}, {"w", to_json(p.w)}}; }

inline Json to_json(const Check& c) {
    return {{"name", c.name},   {"comparison", c.comparison}, {"value", c.value}, {"target", c.target},
            {"tolerance", c.tolerance}, {"pass", c.pass},     {"anchor", c.anchor}};
}

inline Json to_json(const CriterionResult& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    Json j = {{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

/// Verification document. Timings are left out to keep reruns identical.
inline Json verification_report(const std::vector<CriterionResult>& results, const AcceptanceOptions& opt) {
    Json list = Json::array();
    bool all = true;
    for (const auto& r : results) {
        list.push_back(to_json(r));
        all = all && r.pass();
    }
    return {{"schema_version", report_schema_version},
            {"kind", "verification"},
            {"options", {{"c_scale", opt.c_scale}, {"closure_tolerance", opt.closure_tolerance}}},
            {"criteria", list},
            {"pass", all}};
}

inline Json catalog_report(bool with_ck, int k_max = 4) {
    Json entries = Json::array();
    for (const auto& e : catalog_list()) {
        Json j = {{"name", e.name}, {"defaults", e.defaults}, {"constraints", e.constraints}, {"anchor", e.anchor}};
        if (with_ck && (e.name == "genus_k" || e.name == "genus_k_reduced")) {
            Json ck = Json::object();
            for (int k = e.name == "genus_k" ? 1 : 2; k <= k_max; k += e.name == "genus_k" ? 1 : 2)
                ck[std::to_string(k)] = compute_ck(k).c;
            j["c_k"] = ck;
        }
        entries.push_back(j);
    }
    return {{"schema_version", report_schema_version}, {"kind", "catalog"}, {"surfaces", entries}};
}

/// One row per k: constants, root oracle, closure residual.
inline Json period_report(int k_min, int k_max, double closure_tolerance = 1e-8) {
    if (k_min < 1 || k_max < k_min) throw ValidationError("period report needs 1 <= k_min <= k_max");
    Json rows = Json::array();
    for (int k = k_min; k <= k_max; ++k) {
        const CkSolution s = compute_ck(k);
        const double root = solve_ck_by_root(k);
        const double residual = closure_residuals(genus_k_data(k, s.c)).max_residual();
        rows.push_back({{"k", k},
                        {"A", s.A},
                        {"B", s.B},
                        {"c", s.c},
                        {"rho", s.rho},
                        {"Gamma", s.Gamma},
                        {"lower_bound", k >= 2 ? Json(s.lower_bound) : Json(nullptr)},
                        {"root_oracle", root},
                        {"oracle_agreement", std::abs(root - s.c)},
                        {"oracle_agreement_pass", std::abs(root - s.c) < 1e-8},
                        {"closure_residual", residual},
                        {"closure_tolerance", closure_tolerance},
                        {"closure_pass", residual < closure_tolerance},
                        {"rho_in_range", s.rho > 0 && s.rho < 2}});
    }
    return {{"schema_version", report_schema_version}, {"kind", "periods"}, {"rows", rows}};
}

struct SingularRun {
    WeierstrassData data;
    TraceOptions options;
    std::vector<SingularComponent> components;
    std::vector<SingularityCount> counts;
    std::vector<ConeLikeReport> flags;
};

inline SingularRun run_singular(const WeierstrassData& d, const TraceOptions& o, double flag_eps = 1e-8) {
    SingularRun r{d, o, trace_singular_set(d, o), {}, {}};
    for (const auto& c : r.components) {
        r.counts.push_back(count_singularities(d, c, o.chart));
        r.flags.push_back(detect_cone_like(d, c, o.chart, flag_eps));
    }
    return r;
}

inline Json singular_report(const SingularRun& r) {
    Json comps = Json::array();
    std::size_t sw = 0, cc = 0;
    for (std::size_t i = 0; i < r.components.size(); ++i) {
        Json s = Json::array(), x = Json::array();
        for (const auto& p : r.counts[i].swallowtails) s.push_back(to_json(p.p));
        for (const auto& p : r.counts[i].cross_caps) x.push_back(to_json(p.p));
        sw += r.counts[i].swallowtails.size();
        cc += r.counts[i].cross_caps.size();
        comps.push_back({{"label", r.components[i].label},
                         {"closed", r.components[i].closed},
                         {"cone_like", r.flags[i].cone_like},
                         {"fold_candidate", r.flags[i].fold_candidate},
                         {"swallowtails", s},
                         {"cross_caps", x},
                         {"cuspidal_edge_vertices", r.counts[i].cuspidal_edge_vertices},
                         {"unclassified_vertices", r.counts[i].unclassified},
                         {"vertex_count", r.components[i].points.size()}});
    }
    return {{"schema_version", report_schema_version},
            {"kind", "singular"},
            {"surface", r.data.name},
            {"params", r.data.params},
            {"components", comps},
            {"totals", {{"swallowtails", sw}, {"cross_caps", cc}}}};
}

/// Deformation report for one (k, t) cell.
inline Json deformation_report(int k, double t) {
    const NuExponents nu = nu_exponents(k, t);  // rejects t outside the admissible range
    const Su11Certificate cert = su11_certify(k, t);
    const TraceIdentity tr = trace_identity_check(admissible_pair(k, t), cert.iota.iota1);
    Json rho = Json::array();
    for (const auto& m : cert.rho_tilde) rho.push_back(to_json(m));
    return {{"k", k},
            {"t", t},
            {"iota", to_json(cert.iota.iota)},
            {"iota1", to_json(cert.iota.iota1)},
            {"rho_tilde", rho},
            {"su11_defects", cert.defects},
            {"generator_defects", cert.generator_defects},
            {"su11_tolerance", 1e-8},
            {"certified", cert.certified},
            {"trace_residuals", {{"zero", tr.residual_zero}, {"infinity", tr.residual_infinity}}},
            {"trace_tolerance", 1e-6},
            {"nu0", nu.zero},
            {"nu_inf", nu.infinity},
            {"q_abs", std::abs(cert.iota.q)},
            {"r1", cert.iota.r1},
            {"r2", cert.iota.r2}};
}

inline Json error_document(const std::string& kind, const std::string& message) {
    return {{"schema_version", report_schema_version}, {"kind", "error"}, {"error", {{"type", kind}, {"message", message}}}};
}

} // namespace maxface
