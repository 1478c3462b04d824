#pragma once

#include "dimerloops/enumerate.hpp"
#include "dimerloops/errors.hpp"
#include "dimerloops/loops.hpp"
#include "dimerloops/matching.hpp"
#include "dimerloops/rational.hpp"
#include "dimerloops/torus_lattice.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

namespace dimerloops {

// ---------------------------------------------------------------------------
// Configurations. A loop config is a triplet (M, d1, d2) with d1, d2 covering
// the torus minus the monomer set M. A walk config (endpoints x != y) has
// d1 covering V \ (M + {x,y}) and d2 covering V \ M, so the superposition is
// disjoint loops plus one alternating self-avoiding walk from x to y whose
// first edge at x is a d2 edge. The degenerate walk ensemble Omega(z,z) takes
// M with both covers in D(M + {z}); the walk is the single uncovered vertex z,
// which carries no monomer activity.
// ---------------------------------------------------------------------------

struct MddConfig {
    const TorusLattice* lattice = nullptr;
    bool is_walk = false;
    Vertex x = 0, y = 0; // walk endpoints (walk configs only)
    std::vector<Vertex> monomers;
    Matching d1, d2;
    int loop_count = 0;         // 2-cycles (doubled edges) count as loops
    std::vector<Vertex> walk;   // walk vertices x..y (walk configs, x != y)
};

namespace mdd_detail {

// Counts the loops of d1 + d2 among vertices not in `skip` (bitmask) and not
// excluded; every counted component must be a closed alternating cycle.
inline int count_loops(std::span<const Vertex> p1, std::span<const Vertex> p2,
                       std::uint64_t excluded_mask, std::uint64_t walk_mask = 0)
{
    const Vertex n = static_cast<Vertex>(p1.size());
    std::uint64_t seen = excluded_mask | walk_mask;
    int loops = 0;
    for (Vertex v = 0; v < n; ++v) {
        if ((seen >> v) & 1) continue;
        ++loops;
        loop_detail::trace_loop(p1, p2, v, [&](Vertex u) { seen |= std::uint64_t{1} << u; });
    }
    return loops;
}

// Traces the walk from x (first edge in d2) and returns its vertex list,
// asserting it ends at y.
inline std::vector<Vertex> trace_walk(std::span<const Vertex> p1, std::span<const Vertex> p2,
                                      Vertex x, Vertex y)
{
    std::vector<Vertex> path{x};
    Vertex cur = p2[x];
    bool use_first = true;
    while (cur != y) {
        if (cur < 0 || path.size() > p1.size())
            throw std::logic_error("walk decomposition left its domain");
        path.push_back(cur);
        cur = use_first ? p1[cur] : p2[cur];
        use_first = !use_first;
    }
    path.push_back(y);
    return path;
}

} // namespace mdd_detail

inline MddConfig make_loop_config(const Matching& d1, const Matching& d2)
{
    if (!d1.lattice || d1.lattice != d2.lattice)
        throw std::invalid_argument("loop config needs two covers of one lattice");
    if (d1.lattice->vertex_count() > 63)
        throw std::invalid_argument("config decomposition limited to 63 vertices");
    d1.validate();
    d2.validate();
    if (d1.excluded_set() != d2.excluded_set())
        throw std::invalid_argument("loop config: monomer sets of d1 and d2 differ");
    MddConfig cfg;
    cfg.lattice = d1.lattice;
    cfg.monomers = d1.excluded_set();
    cfg.d1 = d1;
    cfg.d2 = d2;
    std::uint64_t mask = 0;
    for (Vertex m : cfg.monomers) mask |= std::uint64_t{1} << m;
    cfg.loop_count = mdd_detail::count_loops(d1.partner, d2.partner, mask);
    return cfg;
}

inline MddConfig make_walk_config(const Matching& d1, const Matching& d2, Vertex x, Vertex y)
{
    if (!d1.lattice || d1.lattice != d2.lattice)
        throw std::invalid_argument("walk config needs two covers of one lattice");
    if (d1.lattice->vertex_count() > 63)
        throw std::invalid_argument("config decomposition limited to 63 vertices");
    d1.validate();
    d2.validate();
    MddConfig cfg;
    cfg.lattice = d1.lattice;
    cfg.is_walk = true;
    cfg.x = x;
    cfg.y = y;
    cfg.d1 = d1;
    cfg.d2 = d2;
    if (x == y) {
        // degenerate walk: both covers exclude M + {x}; x is not a monomer
        auto ex = d1.excluded_set();
        if (ex != d2.excluded_set())
            throw std::invalid_argument("degenerate walk config: excluded sets differ");
        std::erase(ex, x);
        if (ex.size() == d1.excluded_set().size())
            throw std::invalid_argument("degenerate walk config: x must be uncovered");
        cfg.monomers = ex;
        cfg.walk = {x};
        std::uint64_t mask = 0;
        for (Vertex m : cfg.monomers) mask |= std::uint64_t{1} << m;
        mask |= std::uint64_t{1} << x;
        cfg.loop_count = mdd_detail::count_loops(d1.partner, d2.partner, mask);
        return cfg;
    }
    auto ex1 = d1.excluded_set();
    auto ex2 = d2.excluded_set();
    std::erase(ex1, x);
    std::erase(ex1, y);
    if (ex1 != ex2)
        throw std::invalid_argument("walk config: d1 must exclude exactly M + {x,y}, d2 exactly M");
    cfg.monomers = ex2;
    std::uint64_t mmask = 0;
    for (Vertex m : cfg.monomers) mmask |= std::uint64_t{1} << m;
    cfg.walk = mdd_detail::trace_walk(d1.partner, d2.partner, x, y);
    std::uint64_t wmask = 0;
    for (Vertex v : cfg.walk) wmask |= std::uint64_t{1} << v;
    cfg.loop_count = mdd_detail::count_loops(d1.partner, d2.partner, mmask, wmask);
    return cfg;
}

// rho^|M| (N/2)^{#loops}; exact for rational rho.
inline Rational mdd_weight(const MddConfig& cfg, int N, const Rational& rho)
{
    if (N < 1) throw std::invalid_argument("N must be a positive integer");
    if (rho < 0) throw std::invalid_argument("rho must be >= 0");
    Rational w = 1;
    for (std::size_t i = 0; i < cfg.monomers.size(); ++i) w *= rho;
    const Rational half_n(N, 2);
    for (int l = 0; l < cfg.loop_count; ++l) w *= half_n;
    return w;
}

// ---------------------------------------------------------------------------
// Partition sweeps. Configurations are grouped by (|M|, #loops, o in M); the
// histogram is exact and evaluates any (N, rho) afterwards.
// ---------------------------------------------------------------------------

struct MddHistogram {
    // key: (monomer count, loop count, origin is monomer)
    std::map<std::tuple<int, int, int>, BigInt> cells;

    void add(int monomers, int loops, bool origin_monomer, std::uint64_t count = 1)
    {
        cells[{monomers, loops, origin_monomer ? 1 : 0}] += count;
    }

    void merge(const MddHistogram& other)
    {
        for (const auto& [k, v] : other.cells) cells[k] += v;
    }

    bool empty() const { return cells.empty(); }

    Rational evaluate(int N, const Rational& rho, bool only_origin_monomer = false) const
    {
        if (N < 1) throw std::invalid_argument("N must be a positive integer");
        if (rho < 0) throw std::invalid_argument("rho must be >= 0");
        int max_m = 0, max_l = 0;
        for (const auto& [k, v] : cells) {
            max_m = std::max(max_m, std::get<0>(k));
            max_l = std::max(max_l, std::get<1>(k));
        }
        std::vector<Rational> rho_pow(max_m + 1), nh_pow(max_l + 1);
        rho_pow[0] = 1;
        for (int i = 1; i <= max_m; ++i) rho_pow[i] = rho_pow[i - 1] * rho;
        nh_pow[0] = 1;
        const Rational half_n(N, 2);
        for (int i = 1; i <= max_l; ++i) nh_pow[i] = nh_pow[i - 1] * half_n;
        Rational z = 0;
        for (const auto& [k, v] : cells) {
            if (only_origin_monomer && std::get<2>(k) == 0) continue;
            if (rho == 0 && std::get<0>(k) > 0) continue;
            z += Rational(v) * rho_pow[std::get<0>(k)] * nh_pow[std::get<1>(k)];
        }
        return z;
    }
};

struct MddSweepBudget {
    int max_vertices_full = 16; // monomer sweeps: 2^|V| subsets are in play
    int max_vertices_rho_zero = 36;

    static MddSweepBudget from_env()
    {
        MddSweepBudget b;
        if (const char* env = std::getenv("DIMERLOOPS_BUDGET")) {
            int v = std::atoi(env);
            if (v > 0) {
                b.max_vertices_full = v;
                b.max_vertices_rho_zero = v;
            }
        }
        return b;
    }
};

namespace mdd_detail {

inline void check_budget(const TorusLattice& lat, bool rho_zero, const MddSweepBudget& budget)
{
    const int limit = rho_zero ? budget.max_vertices_rho_zero : budget.max_vertices_full;
    if (lat.vertex_count() > limit)
        throw budget_exceeded(
            "monomer-double-dimer sweep refused: " + std::to_string(lat.vertex_count()) +
            " vertices exceed budget of " + std::to_string(limit) +
            (rho_zero ? "" : " (full monomer sweeps need rho = 0 beyond 16 vertices)"));
    if (lat.vertex_count() > 63) throw budget_exceeded("bitmask sweep limited to 63 vertices");
}

// Enumerates all k-subsets of `pool` as bitmasks, invoking f(mask).
template <typename F>
void for_each_subset(const std::vector<Vertex>& pool, int k, F&& f, std::uint64_t base = 0)
{
    const int n = static_cast<int>(pool.size());
    if (k > n) return;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        std::uint64_t mask = base;
        for (int i : idx) mask |= std::uint64_t{1} << pool[i];
        f(mask);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline std::vector<Vertex> mask_to_vertices(std::uint64_t mask)
{
    std::vector<Vertex> out;
    for (int v = 0; mask; ++v, mask >>= 1)
        if (mask & 1) out.push_back(v);
    return out;
}

// All candidate monomer masks with ke vertices from the even and ko from the
// odd sublattice, excluding `forbidden`.
inline std::vector<std::uint64_t> balanced_monomer_masks(const TorusLattice& lat, int delta_odd,
                                                         std::uint64_t forbidden)
{
    std::vector<Vertex> evens, odds;
    for (Vertex v = 0; v < lat.vertex_count(); ++v) {
        if ((forbidden >> v) & 1) continue;
        (lat.even_vertex(v) ? evens : odds).push_back(v);
    }
    std::vector<std::uint64_t> masks;
    for (int ke = 0;; ++ke) {
        int ko = ke + delta_odd;
        if (ke > static_cast<int>(evens.size()) || ko < 0 || ko > static_cast<int>(odds.size()))
            break;
        for_each_subset(evens, ke, [&](std::uint64_t me) {
            for_each_subset(odds, ko, [&](std::uint64_t mo) { masks.push_back(me | mo); }, me);
        });
    }
    return masks;
}

template <typename PerMask>
void parallel_over_masks(const std::vector<std::uint64_t>& masks, int threads, MddHistogram& out,
                         PerMask&& per_mask)
{
    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::max(1, std::min<int>(nt, 16));
    if (nt == 1 || masks.size() < 64) {
        for (std::uint64_t m : masks) per_mask(m, out);
        return;
    }
    std::vector<MddHistogram> parts(nt);
    std::vector<std::thread> pool;
    for (int k = 0; k < nt; ++k) {
        pool.emplace_back([&, k] {
            for (std::size_t i = k; i < masks.size(); i += nt) per_mask(masks[i], parts[k]);
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : parts) out.merge(p);
}

} // namespace mdd_detail

// Histogram of the loop ensemble Omega = Omega^l: all (M, d1, d2) with
// d1, d2 in D(M). rho_zero restricts to M = empty.
inline MddHistogram loop_ensemble_histogram(const TorusLattice& lat, bool rho_zero = false,
                                            int threads = 0,
                                            const MddSweepBudget& budget = MddSweepBudget::from_env())
{
    mdd_detail::check_budget(lat, rho_zero, budget);
    EnumerationBudget ebudget{.max_vertices = budget.max_vertices_rho_zero};

    MddHistogram hist;
    auto per_mask = [&](std::uint64_t mask, MddHistogram& h) {
        auto mverts = mdd_detail::mask_to_vertices(mask);
        CoverList covers = collect_covers(lat, mverts, ebudget);
        const std::size_t n = covers.size();
        if (n == 0) return;
        const int mcount = static_cast<int>(mverts.size());
        const bool o_in = mask & 1;
        std::map<int, std::uint64_t> by_loops;
        for (std::size_t i = 0; i < n; ++i) {
            auto p1 = covers[i];
            for (std::size_t j = 0; j < n; ++j)
                ++by_loops[mdd_detail::count_loops(p1, covers[j], mask)];
        }
        for (const auto& [l, c] : by_loops) h.add(mcount, l, o_in, c);
    };

    if (rho_zero) {
        per_mask(0, hist);
        return hist;
    }
    auto masks = mdd_detail::balanced_monomer_masks(lat, 0, 0);
    mdd_detail::parallel_over_masks(masks, threads, hist, per_mask);
    return hist;
}

// Histogram of Omega(x,y). Empty when x != y have equal parity (the walk
// alternates d2/d1/../d2, so its endpoints have opposite parity).
inline MddHistogram walk_ensemble_histogram(const TorusLattice& lat, Vertex x, Vertex y,
                                            bool rho_zero = false, int threads = 0,
                                            const MddSweepBudget& budget = MddSweepBudget::from_env())
{
    mdd_detail::check_budget(lat, rho_zero, budget);
    EnumerationBudget ebudget{.max_vertices = budget.max_vertices_rho_zero};
    MddHistogram hist;

    if (x == y) {
        // Omega(z,z): M with both covers in D(M + {z}); needs one extra
        // monomer on the sublattice opposite to z, so empty at rho = 0
        if (rho_zero) return hist;
        const std::uint64_t zmask = std::uint64_t{1} << x;
        auto per_mask = [&](std::uint64_t mask, MddHistogram& h) {
            auto excl = mdd_detail::mask_to_vertices(mask | zmask);
            CoverList covers = collect_covers(lat, excl, ebudget);
            const std::size_t n = covers.size();
            if (n == 0) return;
            const int mcount = static_cast<int>(excl.size()) - 1;
            const bool o_in = mask & 1; // z itself is never in the mask
            std::map<int, std::uint64_t> by_loops;
            for (std::size_t i = 0; i < n; ++i) {
                auto p1 = covers[i];
                for (std::size_t j = 0; j < n; ++j)
                    ++by_loops[mdd_detail::count_loops(p1, covers[j], mask | zmask)];
            }
            for (const auto& [l, c] : by_loops) h.add(mcount, l, o_in, c);
        };
        const int delta = lat.even_vertex(x) ? +1 : -1;
        auto masks = mdd_detail::balanced_monomer_masks(lat, delta, zmask);
        mdd_detail::parallel_over_masks(masks, threads, hist, per_mask);
        return hist;
    }

    if (lat.even_vertex(x) == lat.even_vertex(y)) return hist; // parity: empty

    const std::uint64_t xy_mask = (std::uint64_t{1} << x) | (std::uint64_t{1} << y);
    auto per_mask = [&](std::uint64_t mask, MddHistogram& h) {
        auto mverts = mdd_detail::mask_to_vertices(mask);
        CoverList d2s = collect_covers(lat, mverts, ebudget);
        if (d2s.size() == 0) return;
        auto excl1 = mdd_detail::mask_to_vertices(mask | xy_mask);
        CoverList d1s = collect_covers(lat, excl1, ebudget);
        if (d1s.size() == 0) return;
        const int mcount = static_cast<int>(mverts.size());
        const bool o_in = mask & 1;
        std::map<int, std::uint64_t> by_loops;
        for (std::size_t i = 0; i < d1s.size(); ++i) {
            auto p1 = d1s[i];
            for (std::size_t j = 0; j < d2s.size(); ++j) {
                auto p2 = d2s[j];
                auto walk = mdd_detail::trace_walk(p1, p2, x, y);
                std::uint64_t wmask = 0;
                for (Vertex v : walk) wmask |= std::uint64_t{1} << v;
                ++by_loops[mdd_detail::count_loops(p1, p2, mask, wmask)];
            }
        }
        for (const auto& [l, c] : by_loops) h.add(mcount, l, o_in, c);
    };
    if (rho_zero) {
        per_mask(0, hist);
        return hist;
    }
    auto masks = mdd_detail::balanced_monomer_masks(lat, 0, xy_mask);
    mdd_detail::parallel_over_masks(masks, threads, hist, per_mask);
    return hist;
}

// ---------------------------------------------------------------------------
// Partition functions and observables.
// ---------------------------------------------------------------------------

struct EnsembleSel {
    enum Kind { omega_loop, omega_walk, omega_walk_union } kind = omega_loop;
    Vertex x = 0, y = 0; // endpoints for omega_walk

    static EnsembleSel loop() { return {}; }
    static EnsembleSel walk(Vertex x, Vertex y) { return {omega_walk, x, y}; }
    static EnsembleSel walk_union() { return {omega_walk_union, 0, 0}; }
};

inline Rational partition_function(const TorusLattice& lat, int N, const Rational& rho,
                                   const EnsembleSel& sel, int threads = 0,
                                   const MddSweepBudget& budget = MddSweepBudget::from_env())
{
    const bool rz = rho == 0;
    switch (sel.kind) {
    case EnsembleSel::omega_loop:
        return loop_ensemble_histogram(lat, rz, threads, budget).evaluate(N, rho);
    case EnsembleSel::omega_walk:
        return walk_ensemble_histogram(lat, sel.x, sel.y, rz, threads, budget).evaluate(N, rho);
    case EnsembleSel::omega_walk_union: {
        Rational z = 0;
        for (Vertex v = 0; v < lat.vertex_count(); ++v)
            z += walk_ensemble_histogram(lat, 0, v, rz, threads, budget).evaluate(N, rho);
        return z;
    }
    }
    throw std::logic_error("unreachable");
}

// Exact two-point values G(o,x) for every x, plus the partition data they
// came from. Values are exact rationals at enumeration scale.
struct CorrelationTable {
    const TorusLattice* lattice = nullptr;
    int N = 2;
    Rational rho;
    Rational z_loop;                // Z_{L,N,rho}
    std::vector<Rational> z_walk;   // Z_{L,N,rho}(o,x) per x
    std::vector<Rational> values;   // G(o,x) per x

    const Rational& g(Vertex x) const { return values[x]; }
};

inline CorrelationTable correlation_table(const TorusLattice& lat, int N, const Rational& rho,
                                          int threads = 0,
                                          const MddSweepBudget& budget = MddSweepBudget::from_env())
{
    CorrelationTable t;
    t.lattice = &lat;
    t.N = N;
    t.rho = rho;
    const bool rz = rho == 0;
    t.z_loop = loop_ensemble_histogram(lat, rz, threads, budget).evaluate(N, rho);
    t.z_walk.resize(lat.vertex_count());
    t.values.resize(lat.vertex_count());
    for (Vertex x = 0; x < lat.vertex_count(); ++x) {
        t.z_walk[x] = walk_ensemble_histogram(lat, 0, x, rz, threads, budget).evaluate(N, rho);
        t.values[x] = t.z_walk[x] / t.z_loop;
    }
    return t;
}

inline Rational two_point(const TorusLattice& lat, int N, const Rational& rho, Vertex x,
                          int threads = 0,
                          const MddSweepBudget& budget = MddSweepBudget::from_env())
{
    const bool rz = rho == 0;
    Rational zl = loop_ensemble_histogram(lat, rz, threads, budget).evaluate(N, rho);
    Rational zw = walk_ensemble_histogram(lat, 0, x, rz, threads, budget).evaluate(N, rho);
    return zw / zl;
}

// (1/|V|) sum_x G(o,x): the Cesaro mean bounded below by the constant C.
inline Rational cesaro_sum(const CorrelationTable& table)
{
    Rational s = 0;
    for (const auto& g : table.values) s += g;
    return s / Rational(table.values.size());
}

// Law of the walk endpoint X under the union ensemble: law(x) proportional to
// Z(o,x); law(o) comes from the degenerate single-monomer walk.
inline std::vector<Rational> walk_endpoint_law(const TorusLattice& lat, int N, const Rational& rho,
                                               int threads = 0,
                                               const MddSweepBudget& budget = MddSweepBudget::from_env())
{
    const bool rz = rho == 0;
    std::vector<Rational> z(lat.vertex_count());
    Rational total = 0;
    for (Vertex x = 0; x < lat.vertex_count(); ++x) {
        z[x] = walk_ensemble_histogram(lat, 0, x, rz, threads, budget).evaluate(N, rho);
        total += z[x];
    }
    if (total == 0) throw std::invalid_argument("walk ensemble is empty (rho = 0 and no odd sites?)");
    for (auto& v : z) v /= total;
    return z;
}

// P(o is a monomer) under the loop-ensemble measure; satisfies the Chessboard
// consequence P <= rho, hence G(e1) = (1 - P)/(dN) >= (1 - rho)/(dN).
inline Rational monomer_probability_loop_ensemble(const TorusLattice& lat, int N,
                                                  const Rational& rho, int threads = 0,
                                                  const MddSweepBudget& budget = MddSweepBudget::from_env())
{
    const bool rz = rho == 0;
    auto hist = loop_ensemble_histogram(lat, rz, threads, budget);
    Rational z = hist.evaluate(N, rho);
    Rational zo = hist.evaluate(N, rho, /*only_origin_monomer=*/true);
    return zo / z;
}

} // namespace dimerloops
