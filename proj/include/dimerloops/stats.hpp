#pragma once

#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dimerloops {

// Compensated (Kahan) summation; chain merges must not depend on float order
// beyond this.
inline double kahan_sum(std::span<const double> xs)
{
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

struct SeriesStats {
    double mean = 0.0;
    double std_error = 0.0;
    double tau_int = 0.5; // integrated autocorrelation time, >= 0.5
    std::size_t n = 0;
};

// Mean, integrated autocorrelation time (self-consistent window, c = 6), and
// the autocorrelation-corrected standard error of the mean.
inline SeriesStats analyze_series(std::span<const double> xs)
{
    SeriesStats st;
    st.n = xs.size();
    if (xs.empty()) return st;
    st.mean = kahan_sum(xs) / static_cast<double>(xs.size());
    if (xs.size() < 2) return st;

    const std::size_t n = xs.size();
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = xs[i] - st.mean;
    double var = 0.0;
    for (double d : dev) var += d * d;
    var /= static_cast<double>(n);
    if (var <= 0.0) {
        st.std_error = 0.0;
        return st;
    }

    double tau = 0.5;
    std::size_t max_lag = n / 4;
    for (std::size_t t = 1; t <= max_lag; ++t) {
        double g = 0.0;
        for (std::size_t i = 0; i + t < n; ++i) g += dev[i] * dev[i + t];
        g /= static_cast<double>(n - t) * var;
        tau += g;
        if (static_cast<double>(t) >= 6.0 * tau) break;
    }
    st.tau_int = std::max(0.5, tau);
    st.std_error = std::sqrt(2.0 * st.tau_int * var / static_cast<double>(n));
    return st;
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pearson chi-square against the uniform distribution over `counts.size()`
// cells; upper-tail p-value via the regularized incomplete gamma function.
inline ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts)
{
    ChiSquareResult r;
    r.dof = static_cast<int>(counts.size()) - 1;
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0 || counts.size() < 2) return r;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    r.statistic = stat;
    r.p_value = gsl_sf_gamma_inc_Q(0.5 * r.dof, 0.5 * stat);
    return r;
}

} // namespace dimerloops
