// Writes an OBJ of every catalog surface at its default parameters.

#include <fstream>
#include <iostream>

#include "maxface/weierstrass.hpp"

int main() {
    using namespace maxface;
    for (const auto& entry : catalog_list()) {
        const WeierstrassData d = catalog_get(entry.name);
        GridSpec g;
        g.nu = 16;
        g.nv = 32;
        // keep the radial columns off the real axis, where most branch points and ends sit
        g.v0 = pi / g.nv;
        g.v1 = 2 * pi - pi / g.nv;
        if (entry.name == "cone") {  // both ends lie on the unit circle
            g.u0 = 1.2;
            g.u1 = 3.0;
        }
        try {
            const Mesh m = mesh_sample(d, g);
            std::ofstream os(entry.name + ".obj");
            write_obj(os, m, entry.name);
            std::cout << entry.name << ": " << m.vertices.size() << " vertices\n";
        } catch (const std::exception& e) {
            std::cout << entry.name << ": skipped (" << e.what() << ")\n";
        }
    }
}
