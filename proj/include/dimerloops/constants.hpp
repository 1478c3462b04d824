#pragma once

#include "dimerloops/green.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dimerloops {

// All constants entering the two theorems' bounds, assembled from r_d.
// C may be <= 0 outside the admissible (N, rho) region; it is reported as-is
// with in_range = false rather than hidden.
struct BoundConstants {
    int d = 0;
    int N = 0;
    double rho = 0.0;
    double r_d = 0.0;
    double r_d_error = 0.0;
    std::string r_d_method;

    double C = 0.0;               // (1/4d)((3pi-4)/(pi N)(1-rho) - r_d/2)
    double theorem1_lower = 0.0;  // ((1/2d)(1 - r_d/2))^2
    double theorem1_upper = 0.0;  // (1/2d)(2 - 1/2d)
    double rho_threshold = 0.0;   // 1 - pi r_d N/(2(3pi-4))
    double n_range_max = 0.0;     // 2(3pi-4)/(pi r_d)
    double i_limit = 0.0;         // r_d/(4d), the limit of the finite-L term
    bool in_range = false;        // N in (0, n_range_max) and rho in [0, rho_threshold)
};

inline BoundConstants bound_constants_from_rd(int d, int N, double rho, const RdEstimate& rd)
{
    if (N < 1) throw std::invalid_argument("N must be a positive integer");
    if (rho < 0.0) throw std::invalid_argument("rho must be >= 0");
    const double pi = std::numbers::pi;
    BoundConstants b;
    b.d = d;
    b.N = N;
    b.rho = rho;
    b.r_d = rd.value;
    b.r_d_error = rd.error_bound;
    b.r_d_method = rd.method;
    const double k = (3.0 * pi - 4.0) / pi;
    b.C = (k / N * (1.0 - rho) - b.r_d / 2.0) / (4.0 * d);
    b.theorem1_lower = std::pow((1.0 - b.r_d / 2.0) / (2.0 * d), 2);
    b.theorem1_upper = (2.0 - 1.0 / (2.0 * d)) / (2.0 * d);
    b.rho_threshold = 1.0 - pi * b.r_d * N / (2.0 * (3.0 * pi - 4.0));
    b.n_range_max = 2.0 * (3.0 * pi - 4.0) / (pi * b.r_d);
    b.i_limit = b.r_d / (4.0 * d);
    b.in_range = N < b.n_range_max && rho < b.rho_threshold;
    return b;
}

inline BoundConstants bound_constants(int d, int N, double rho)
{
    return bound_constants_from_rd(d, N, rho, r_d_quadrature(d));
}

} // namespace dimerloops
