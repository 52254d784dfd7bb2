// Prints the closing constants c_k and the resulting period residuals.

#include <cstdio>

#include "maxface/periods.hpp"

int main() {
    using namespace maxface;
    std::printf("%3s %16s %16s %12s\n", "k", "c_k", "rho_k", "residual");
    for (int k = 1; k <= 6; ++k) {
        const CkSolution s = compute_ck(k);
        const double r = closure_residuals(genus_k_data(k, s.c)).max_residual();
        std::printf("%3d %16.12f %16.12f %12.3e\n", k, s.c, s.rho, r);
    }
}
