#pragma once

// The constants A_k, B_k, c_k, rho_k and Gamma_k of the genus-k family.

#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "maxface/quadrature.hpp"

namespace maxface {

struct CkSolution {
    int k = 1;
    double A = 0.0;
    double B = 0.0;
    double c = 0.0;
    double rho = 0.0;
    double Gamma = 0.0;
    /// Explicit lower bound for c_k (1 for k = 1).
    double lower_bound = 0.0;
};

/// A_k = int_0^1 (t/(1-t^2))^{1/(k+1)} dt and
/// B_k = int_0^1 (t (1-t^2)^k)^{-1/(k+1)} dt by tanh-sinh quadrature.
inline std::pair<double, double> compute_AkBk(int k, double tol = 1e-12) {
    if (k < 1) throw ValidationError("compute_AkBk: k must be >= 1");
    const double p = 1.0 / (k + 1);
    QuadratureSpec sa{p, -p, tol, 14};
    QuadratureSpec sb{-p, -k * p, tol, 14};
    const double A = quad_singular(
                         [p](double t, double u) {
                             return std::pow(t / (u * (1.0 + t)), p);
                         },
                         sa)
                         .value;
    const double B = quad_singular(
                         [p, k](double t, double u) {
                             return std::pow(t, -p) * std::pow(u * (1.0 + t), -k * p);
                         },
                         sb)
                         .value;
    return {A, B};
}

/// Closed forms after the substitution u = t^2.
inline std::pair<double, double> AkBk_beta(int k) {
    const double n = k + 1.0;
    return {0.5 * beta_function((k + 2.0) / (2.0 * n), k / n), 0.5 * beta_function(k / (2.0 * n), 1.0 / n)};
}

/// k^{1/(2(k+1))} (k/(k-1))^{(k-1)/(2(k+1))} / sqrt 2 for k >= 2.
inline double ck_lower_bound(int k) {
    if (k < 2) return 1.0;
    const double n = k + 1.0;
    return std::pow(k, 1.0 / (2.0 * n)) * std::pow(double(k) / (k - 1.0), (k - 1.0) / (2.0 * n)) / std::sqrt(2.0);
}

/// c_k = sqrt(B_k / (2 A_k)) with rho_k and Gamma_k. Throws if a bound fails.
inline CkSolution compute_ck(int k) {
    CkSolution s;
    s.k = k;
    std::tie(s.A, s.B) = compute_AkBk(k);
    s.c = std::sqrt(s.B / (2.0 * s.A));
    s.rho = std::pow(s.c, -2.0 * (k + 1.0) / k);
    s.Gamma = std::asin(std::sqrt(s.rho) / 2.0);
    s.lower_bound = ck_lower_bound(k);
    if (!(s.A > 0 && s.B > 0)) throw NumericalError("compute_ck: non-positive period integral");
    if (!(s.c > s.lower_bound))
        throw NumericalError("compute_ck: c_k = " + std::to_string(s.c) + " violates its lower bound " +
                             std::to_string(s.lower_bound));
    if (!(s.rho > 0.0 && s.rho < 2.0)) throw NumericalError("compute_ck: rho_k outside (0, 2)");
    if (!(s.Gamma > 0.0 && s.Gamma < pi / 4)) throw NumericalError("compute_ck: Gamma_k outside (0, pi/4)");
    return s;
}

} // namespace maxface
