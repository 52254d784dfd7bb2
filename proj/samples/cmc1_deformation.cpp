// Follows the CMC-1 deformation of the genus-1 maxface for a few values of t
// and prints the end exponents and how close the monodromy is to SU(1,1).

#include <cstdio>

#include "maxface/cmc1.hpp"

int main() {
    using namespace maxface;
    const int k = 1;
    std::printf("%8s %10s %10s %12s %10s\n", "t", "nu0", "nu_inf", "su11 defect", "certified");
    for (double t : {0.0, 0.01, 0.02, 0.05}) {
        const NuExponents nu = nu_exponents(k, t);
        const Su11Certificate cert = su11_certify(k, t);
        std::printf("%8.3f %10.6f %10.6f %12.3e %10s\n", t, nu.zero, nu.infinity, cert.max_defect,
                    cert.certified ? "yes" : "no");
    }
}
