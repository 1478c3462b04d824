#pragma once

#include "dimerloops/enumerate.hpp"
#include "dimerloops/matching.hpp"
#include "dimerloops/rational.hpp"
#include "dimerloops/torus_lattice.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dimerloops {

// Superposition of two full covers: every vertex has degree two in d1 + d2,
// and the components are disjoint self-avoiding loops. A doubled edge is a
// loop of length two.
struct DoubleDimerConfig {
    const TorusLattice* lattice = nullptr;
    Matching d1, d2;
    std::vector<std::vector<Vertex>> loops; // canonical: start at the minimal
                                            // vertex, first step along its d1 edge
    std::vector<std::int32_t> loop_of;
};

namespace loop_detail {

// Walks the loop through `start`, alternating d1/d2 edges beginning with d1.
template <typename OnVertex>
inline void trace_loop(std::span<const Vertex> p1, std::span<const Vertex> p2, Vertex start,
                       OnVertex&& on_vertex)
{
    on_vertex(start);
    Vertex cur = p1[start];
    bool use_second = true;
    while (cur != start) {
        on_vertex(cur);
        cur = use_second ? p2[cur] : p1[cur];
        use_second = !use_second;
    }
}

} // namespace loop_detail

inline DoubleDimerConfig decompose_loops(const Matching& d1, const Matching& d2)
{
    if (!d1.lattice || d1.lattice != d2.lattice || !d1.lattice->same_shape(*d2.lattice))
        throw std::invalid_argument("double-dimer superposition needs two covers of one lattice");
    const TorusLattice& lat = *d1.lattice;
    const Vertex n = lat.vertex_count();
    for (Vertex v = 0; v < n; ++v)
        if (d1.excluded(v) || d2.excluded(v))
            throw std::invalid_argument("double-dimer covers must have empty excluded set");

    DoubleDimerConfig cfg;
    cfg.lattice = &lat;
    cfg.d1 = d1;
    cfg.d2 = d2;
    cfg.loop_of.assign(n, -1);
    for (Vertex v = 0; v < n; ++v) {
        if (cfg.loop_of[v] >= 0) continue;
        std::int32_t id = static_cast<std::int32_t>(cfg.loops.size());
        std::vector<Vertex> cycle;
        loop_detail::trace_loop(d1.partner, d2.partner, v, [&](Vertex u) {
            cycle.push_back(u);
            cfg.loop_of[u] = id;
        });
        cfg.loops.push_back(std::move(cycle));
    }
    return cfg;
}

// |L_o|: number of vertices on the loop through the origin.
inline int loop_length_through_origin(const DoubleDimerConfig& cfg)
{
    return static_cast<int>(cfg.loops[cfg.loop_of[0]].size());
}

inline bool connected(const DoubleDimerConfig& cfg, Vertex x, Vertex y)
{
    return cfg.loop_of[x] == cfg.loop_of[y];
}

// Exact statistics of the uniform double-dimer measure, from one streamed
// sweep over all ordered cover pairs: for each pair the loop through the
// origin is traced once, giving |L_o| and the full set of connected vertices.
struct ExactDoubleDimerStats {
    Vertex vertex_count = 0;
    Vertex odd_count = 0;
    BigInt pair_count = 0;                  // |D(empty)|^2
    std::vector<std::uint64_t> conn_counts; // ordered pairs with o <-> x
    std::uint64_t loop_length_sum = 0;      // sum over pairs of |L_o|

    Rational connection_probability(Vertex x) const
    {
        return Rational(BigInt(conn_counts[x]), pair_count);
    }

    Rational loop_density() const
    {
        return Rational(BigInt(loop_length_sum), pair_count * vertex_count);
    }

    // (1/|V^o|) sum over odd x of P(o <-> x); equals loop_density exactly
    // because every loop visits as many even as odd vertices.
    Rational loop_density_via_odd_sites(const TorusLattice& lat) const
    {
        BigInt acc = 0;
        for (Vertex v = 0; v < vertex_count; ++v)
            if (!lat.even_vertex(v)) acc += conn_counts[v];
        return Rational(acc, pair_count * odd_count);
    }
};

inline ExactDoubleDimerStats exact_double_dimer_stats(
    const TorusLattice& lat, int threads = 0,
    const EnumerationBudget& budget = EnumerationBudget::from_env())
{
    CoverList covers = collect_covers(lat, {}, budget);
    const std::size_t n = covers.size();
    const Vertex V = lat.vertex_count();

    ExactDoubleDimerStats stats;
    stats.vertex_count = V;
    stats.odd_count = V / 2;
    stats.pair_count = BigInt(n) * BigInt(n);
    stats.conn_counts.assign(V, 0);

    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::max(1, std::min<int>(nt, 64));
    std::vector<std::vector<std::uint64_t>> conn(nt, std::vector<std::uint64_t>(V, 0));
    std::vector<std::uint64_t> lensum(nt, 0);

    auto sweep = [&](int k) {
        std::size_t lo = n * k / nt, hi = n * (k + 1) / nt;
        auto& c = conn[k];
        std::uint64_t& ls = lensum[k];
        for (std::size_t i = lo; i < hi; ++i) {
            auto p1 = covers[i];
            for (std::size_t j = 0; j < n; ++j) {
                auto p2 = covers[j];
                loop_detail::trace_loop(p1, p2, 0, [&](Vertex u) {
                    ++c[u];
                    ++ls;
                });
            }
        }
    };
    if (nt == 1) {
        sweep(0);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < nt; ++k) pool.emplace_back(sweep, k);
        for (auto& th : pool) th.join();
    }
    for (int k = 0; k < nt; ++k) {
        stats.loop_length_sum += lensum[k];
        for (Vertex v = 0; v < V; ++v) stats.conn_counts[v] += conn[k][v];
    }
    return stats;
}

// P_L(x <-> y): fraction of ordered cover pairs whose superposition puts x and
// y on one loop.
inline Rational exact_connection_probability(
    const TorusLattice& lat, Vertex x, Vertex y, int threads = 0,
    const EnumerationBudget& budget = EnumerationBudget::from_env())
{
    if (x == y) return Rational(1);
    if (x == 0 || y == 0) {
        auto stats = exact_double_dimer_stats(lat, threads, budget);
        return stats.connection_probability(x == 0 ? y : x);
    }
    CoverList covers = collect_covers(lat, {}, budget);
    const std::size_t n = covers.size();
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto p1 = covers[i];
        for (std::size_t j = 0; j < n; ++j) {
            auto p2 = covers[j];
            bool found = false;
            loop_detail::trace_loop(p1, p2, x, [&](Vertex u) { found |= (u == y); });
            hits += found;
        }
    }
    return Rational(BigInt(hits), BigInt(n) * BigInt(n));
}

// (1/|V_L|) E_L[|L_o|], from the pair sweep.
inline Rational expected_loop_density(const TorusLattice& lat, int threads = 0,
                                      const EnumerationBudget& budget = EnumerationBudget::from_env())
{
    return exact_double_dimer_stats(lat, threads, budget).loop_density();
}

// ---------------------------------------------------------------------------
// The constructive injection
//   phi : D({o,x}) x D({e1, x+e1}) -> { (d1', d2') in D(empty)^2 : o <-> x }.
// Orange dimers are d1's, blue are d2's; after adding orange dimers on
// {o,e1} and {x,x+e1}, the colors along the alternating path from x+e1 to e1
// (which cannot touch o or x) are switched, leaving every vertex with exactly
// one orange and one blue dimer.
// ---------------------------------------------------------------------------

inline DoubleDimerConfig kenyon_injection(const Matching& d1, const Matching& d2, Vertex x)
{
    if (!d1.lattice || d1.lattice != d2.lattice)
        throw std::invalid_argument("kenyon_injection: mismatched lattices");
    const TorusLattice& lat = *d1.lattice;
    const Vertex o = 0;
    if (lat.even_vertex(x)) throw std::invalid_argument("kenyon_injection: x must be odd");
    const Vertex e1 = lat.axis_point(1, 1);

    if (lat.adjacent(o, x)) {
        // adjacent case: both inputs live in D({o,x}); one doubled dimer on
        // {o,x} closes a 2-loop through the pair
        for (Vertex v : {o, x}) {
            if (!d1.excluded(v) || !d2.excluded(v))
                throw std::invalid_argument("kenyon_injection: inputs must exclude {o,x}");
        }
        Matching m1 = d1, m2 = d2;
        m1.partner[o] = x;
        m1.partner[x] = o;
        m2.partner[o] = x;
        m2.partner[x] = o;
        auto cfg = decompose_loops(m1, m2);
        if (!connected(cfg, o, x)) throw std::logic_error("doubled-edge embedding failed");
        return cfg;
    }

    const Vertex xe1 = lat.step(x, 0, +1); // x + e1
    if (!d1.excluded(o) || !d1.excluded(x))
        throw std::invalid_argument("kenyon_injection: d1 must exclude exactly {o,x}");
    if (!d2.excluded(e1) || !d2.excluded(xe1))
        throw std::invalid_argument("kenyon_injection: d2 must exclude exactly {e1, x+e1}");
    if (static_cast<int>(d1.excluded_set().size()) != 2 ||
        static_cast<int>(d2.excluded_set().size()) != 2)
        throw std::invalid_argument("kenyon_injection: wrong excluded sets");

    // In the superposition of d1 (orange, misses {o,x}) and d2 (blue, misses
    // {e1,x+e1}) the four defect vertices are endpoints of two alternating
    // paths. Orienting orange edges even->odd and blue edges odd->even makes
    // x and x+e1 sources and o and e1 sinks, so the pairing is either
    // {x+e1 -> e1, x -> o} or {x+e1 -> o, x -> e1}; both occur.
    auto trace_path = [&](Vertex start, bool first_orange,
                          std::initializer_list<Vertex> stops) {
        std::vector<Vertex> path{start};
        Vertex cur = start;
        bool on_orange = first_orange;
        for (;;) {
            Vertex nxt = on_orange ? d1.partner[cur] : d2.partner[cur];
            if (nxt < 0 || path.size() > static_cast<std::size_t>(lat.vertex_count()))
                throw std::logic_error("kenyon_injection: color-switch path left its domain");
            path.push_back(nxt);
            if (std::find(stops.begin(), stops.end(), nxt) != stops.end()) return path;
            cur = nxt;
            on_orange = !on_orange;
        }
    };

    std::vector<Vertex> orange = d1.partner; // covers all but {o,x}
    std::vector<Vertex> blue = d2.partner;   // covers all but {e1, x+e1}

    auto switch_colors = [&](const std::vector<Vertex>& path, bool first_orange) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            Vertex a = path[i], b = path[i + 1];
            bool edge_orange = first_orange == (i % 2 == 0);
            if (edge_orange) { // orange edge becomes blue
                blue[a] = b;
                blue[b] = a;
            } else {
                orange[a] = b;
                orange[b] = a;
            }
        }
    };

    auto path = trace_path(xe1, /*first_orange=*/true, {e1, o, x});
    if (path.back() == x) throw std::logic_error("kenyon_injection: path ended at a source");
    if (path.back() == e1) {
        // paths pair {x+e1 -> e1, x -> o}: switch along x+e1 -> e1 and add
        // orange dimers on {o,e1} and {x,x+e1}
        switch_colors(path, true);
        orange[o] = e1;
        orange[e1] = o;
        orange[x] = xe1;
        orange[xe1] = x;
    } else {
        // paths pair {x+e1 -> o, x -> e1}: switch along x -> e1 instead and
        // add an orange dimer on {o,e1} and a blue one on {x,x+e1}
        auto alt = trace_path(x, /*first_orange=*/false, {e1});
        switch_colors(alt, false);
        orange[o] = e1;
        orange[e1] = o;
        blue[x] = xe1;
        blue[xe1] = x;
    }

    Matching m1(lat, std::move(orange));
    Matching m2(lat, std::move(blue));
    m1.validate();
    m2.validate();
    auto cfg = decompose_loops(m1, m2);
    if (!connected(cfg, o, x) || !connected(cfg, o, e1) || !connected(cfg, o, xe1))
        throw std::logic_error("kenyon_injection: output loop misses a required vertex");
    return cfg;
}

} // namespace dimerloops
