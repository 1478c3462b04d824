#pragma once

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimerloops {

namespace spectral_detail {

inline double cot(double x) { return 1.0 / std::tan(x); }

struct KahanAcc {
    double sum = 0.0, c = 0.0;
    void add(double x)
    {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

inline void require_even_axis_point(int L, long long x1)
{
    if (L < 4 || L % 2 != 0) throw std::invalid_argument("L must be even and >= 4");
    if (((x1 % 2) + 2) % 2 != 0)
        throw std::invalid_argument("Upsilon is evaluated at even axis points only");
}

} // namespace spectral_detail

// Re sum over dual-torus momenta with k_1 in (-pi/2, pi/2] of
// e^{-i k (x - e_1)}, for x = x1 e_1 with x1 even. The transverse axes
// contribute the exact factor L^{d-1}. The k_1 window means the integer index
// j = L k_1 / (2 pi) runs over (-L/4, L/4]: for L in 4N that is
// {-L/4+1, .., L/4}; for L in 2N \ 4N it is the symmetric set
// {-(L-2)/4, .., (L-2)/4}.
inline double upsilon_fourier(int L, int d, long long x1)
{
    spectral_detail::require_even_axis_point(L, x1);
    const long long j_hi = (L % 4 == 0) ? L / 4 : (L - 2) / 4;
    const long long j_lo = (L % 4 == 0) ? -L / 4 + 1 : -(L - 2) / 4;
    spectral_detail::KahanAcc acc;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(x1 - 1) / L;
    for (long long j = j_lo; j <= j_hi; ++j) acc.add(std::cos(theta * static_cast<double>(j)));
    double transverse = std::pow(static_cast<double>(L), d - 1);
    return transverse * acc.sum;
}

// Closed form of the same kernel:
//   -L^{d-1} cos(pi x1/2) cot(pi (x1-1)/L)   for L in 4N,
//   -L^{d-1} cos(pi x1/2) csc(pi (x1-1)/L)   for L in 2N \ 4N.
// The argument pi (x1-1)/L is an odd multiple of pi/L, never 0 mod pi.
inline double upsilon_closed_form(int L, int d, long long x1)
{
    spectral_detail::require_even_axis_point(L, x1);
    const double a = std::numbers::pi * static_cast<double>(x1 - 1) / L;
    const double parity = (((x1 / 2) % 2 + 2) % 2 == 0) ? 1.0 : -1.0; // cos(pi x1 / 2)
    const double kernel = (L % 4 == 0) ? spectral_detail::cot(a) : 1.0 / std::sin(a);
    return -std::pow(static_cast<double>(L), d - 1) * parity * kernel;
}

namespace spectral_detail {

inline void require_symmetric_axis_function(int L, std::span<const double> g)
{
    if (static_cast<int>(g.size()) != L / 2)
        throw std::invalid_argument("axis function must list g at x1 = 0, 2, .., L-2");
    for (int i = 1; i < L / 4 + 1 && i < L / 2; ++i) {
        double a = g[i], b = g[(L / 2 - i) % (L / 2)];
        double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
        if (std::fabs(a - b) > 1e-12 * scale)
            throw std::invalid_argument("axis function must satisfy g(x) = g(L - x)");
    }
}

} // namespace spectral_detail

// (1/|V_L|) sum over even axis sites of Upsilon_L(x) g(x1), evaluated term by
// term with the Fourier kernel. g is indexed by x1/2 on {0, 2, .., L-2} and
// must be reflection-symmetric. The transverse factor cancels against 1/|V_L|,
// so the value is independent of d.
inline double direct_upsilon_axis_sum(int L, std::span<const double> g)
{
    spectral_detail::require_symmetric_axis_function(L, g);
    spectral_detail::KahanAcc acc;
    for (int i = 0; i < L / 2; ++i) acc.add(upsilon_fourier(L, 1, 2 * i) * g[i]);
    return acc.sum / L;
}

// The telescoped rearrangement of the same sum for L = 4m: pairs of cot
// differences with alternating signs, plus the g(0) boundary term and the
// vanishing-coefficient term at x1 = L/2.
inline double telescoped_axis_sum(int L, std::span<const double> g)
{
    if (L % 4 != 0 || L < 4) throw std::invalid_argument("telescoped form needs L in 4N");
    spectral_detail::require_symmetric_axis_function(L, g);
    const int m = L / 4;
    const double fm = static_cast<double>(L);
    const double pi = std::numbers::pi;
    spectral_detail::KahanAcc acc;
    for (int n = 1; n < m; ++n) {
        double diff = spectral_detail::cot(pi * (2 * n - 1) / fm) -
                      spectral_detail::cot(pi * (2 * n + 1) / fm);
        acc.add((n % 2 == 1 ? 1.0 : -1.0) * g[n] * diff);
    }
    acc.add(g[0] * spectral_detail::cot(pi / fm));
    const double cos_mpi = (m % 2 == 0) ? 1.0 : -1.0;
    acc.add(-cos_mpi * spectral_detail::cot(pi / 2 - pi / fm) * g[m]);
    return acc.sum / fm;
}

// S_m: the even-site cot-difference tail that the infrared argument bounds.
// Term by term cot is decreasing on (0, pi), so S_m > 0; its limit is the
// Leibniz tail (1/pi)(1/3 - 1/5 + 1/7 - ...) = (4 - pi)/(4 pi).
inline double leibniz_tail_sum(int m)
{
    if (m < 4) throw std::invalid_argument("need m >= 4");
    const double pi = std::numbers::pi;
    spectral_detail::KahanAcc acc;
    for (int n = 1; n <= (m - 1) / 2; ++n) {
        acc.add(spectral_detail::cot(pi * (4 * n - 1) / (4.0 * m)) -
                spectral_detail::cot(pi * (4 * n + 1) / (4.0 * m)));
    }
    return acc.sum / (4.0 * m);
}

inline constexpr double kLeibnizTailLimit = (4.0 - std::numbers::pi) / (4.0 * std::numbers::pi);

struct LeibnizEntry {
    int m = 0;
    double s_m = 0.0;
    double error = 0.0;
};

struct LeibnizReport {
    double limit = kLeibnizTailLimit;
    std::vector<LeibnizEntry> entries; // geometric grid of m up to m_max
    bool errors_decreasing = false;
    double final_error = 0.0;
};

inline LeibnizReport leibniz_limit_check(int m_max)
{
    if (m_max < 4) throw std::invalid_argument("need m_max >= 4");
    LeibnizReport rep;
    std::vector<int> grid;
    for (int m = 50; m < m_max; m *= 2) grid.push_back(m);
    if (grid.empty() || grid.back() != m_max) grid.push_back(m_max);
    if (grid.front() > m_max) grid = {m_max};
    for (int m : grid) {
        LeibnizEntry e;
        e.m = m;
        e.s_m = leibniz_tail_sum(m);
        e.error = std::fabs(e.s_m - rep.limit);
        rep.entries.push_back(e);
    }
    rep.errors_decreasing = true;
    for (std::size_t i = 1; i < rep.entries.size(); ++i)
        if (rep.entries[i].error >= rep.entries[i - 1].error) rep.errors_decreasing = false;
    rep.final_error = rep.entries.back().error;
    return rep;
}

// Right-hand side of the infrared bound,
//   (1/2) (G(e1) - I + (2/|V_L|) sum_{even axis x} Upsilon_L(x) G(x)),
// assembled from an axis table of G values. The exact finite-L term I_L(d)
// lives outside this library; callers pass the limit r_d/(4d) and treat the
// output as an asymptotic diagnostic.
inline double infrared_rhs(int L, int d, double g_e1, std::span<const double> axis_g,
                           double i_value)
{
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (static_cast<int>(axis_g.size()) != L / 2)
        throw std::invalid_argument("incomplete axis table: need G at every even axis point");
    spectral_detail::KahanAcc acc;
    for (int i = 0; i < L / 2; ++i) acc.add(upsilon_fourier(L, 1, 2 * i) * axis_g[i]);
    return 0.5 * (g_e1 - i_value + 2.0 * acc.sum / L);
}

} // namespace dimerloops
