#pragma once

#include "dimerloops/errors.hpp"
#include "dimerloops/matching.hpp"
#include "dimerloops/rational.hpp"
#include "dimerloops/torus_lattice.hpp"

#include <cstdlib>
#include <span>
#include <string>
#include <vector>

namespace dimerloops {

// Exhaustive enumeration is exponential; the guard keeps it to desk scale.
// DIMERLOOPS_BUDGET overrides the vertex limit.
struct EnumerationBudget {
    int max_vertices = 36;

    static EnumerationBudget from_env()
    {
        EnumerationBudget b;
        if (const char* env = std::getenv("DIMERLOOPS_BUDGET")) {
            int v = std::atoi(env);
            if (v > 0) b.max_vertices = v;
        }
        return b;
    }
};

namespace detail {

inline constexpr Vertex kUncovered = -2;

template <typename Visitor>
void enumerate_rec(const TorusLattice& lat, std::vector<Vertex>& partner, int remaining,
                   Visitor&& visit)
{
    if (remaining == 0) {
        visit(std::span<const Vertex>(partner.data(), partner.size()));
        return;
    }
    Vertex v = 0;
    while (partner[v] != kUncovered) ++v;
    // neighbors are stored ascending, so emission order is lexicographic in
    // the partner choice at the lowest uncovered vertex
    for (Vertex w : lat.neighbors(v)) {
        if (partner[w] != kUncovered) continue;
        partner[v] = w;
        partner[w] = v;
        enumerate_rec(lat, partner, remaining - 2, visit);
        partner[v] = kUncovered;
        partner[w] = kUncovered;
    }
}

inline std::vector<Vertex> excluded_template(const TorusLattice& lat,
                                             std::span<const Vertex> excluded)
{
    std::vector<Vertex> partner(lat.vertex_count(), kUncovered);
    for (Vertex v : excluded) {
        if (v < 0 || v >= lat.vertex_count()) throw std::invalid_argument("excluded vertex out of range");
        if (partner[v] == kExcluded) throw std::invalid_argument("duplicate excluded vertex");
        partner[v] = kExcluded;
    }
    return partner;
}

} // namespace detail

// Streams every dimer cover of the torus minus `excluded`, exactly once, in a
// deterministic order. An odd number of remaining vertices yields the empty
// stream (D(A) = empty is meaningful, not an error).
template <typename Visitor>
void for_each_cover(const TorusLattice& lat, std::span<const Vertex> excluded, Visitor&& visit,
                    const EnumerationBudget& budget = EnumerationBudget::from_env())
{
    if (lat.vertex_count() > budget.max_vertices)
        throw budget_exceeded("enumeration refused: " + std::to_string(lat.vertex_count()) +
                              " vertices exceed budget of " + std::to_string(budget.max_vertices) +
                              " (use the transfer matrix or MCMC, or raise DIMERLOOPS_BUDGET)");
    auto partner = detail::excluded_template(lat, excluded);
    int remaining = lat.vertex_count() - static_cast<int>(excluded.size());
    if (remaining % 2 != 0) return;
    detail::enumerate_rec(lat, partner, remaining, visit);
}

inline CoverList collect_covers(const TorusLattice& lat, std::span<const Vertex> excluded,
                                const EnumerationBudget& budget = EnumerationBudget::from_env())
{
    CoverList covers(lat.vertex_count());
    for_each_cover(lat, excluded, [&](std::span<const Vertex> p) { covers.push(p); }, budget);
    return covers;
}

inline std::vector<Matching> enumerate_covers(const TorusLattice& lat,
                                              std::span<const Vertex> excluded,
                                              const EnumerationBudget& budget = EnumerationBudget::from_env())
{
    std::vector<Matching> out;
    for_each_cover(lat, excluded,
                   [&](std::span<const Vertex> p) {
                       out.emplace_back(lat, std::vector<Vertex>(p.begin(), p.end()));
                   },
                   budget);
    return out;
}

inline BigInt count_covers_enumeration(const TorusLattice& lat, std::span<const Vertex> excluded,
                                       const EnumerationBudget& budget = EnumerationBudget::from_env())
{
    BigInt n = 0;
    for_each_cover(lat, excluded, [&](std::span<const Vertex>) { ++n; }, budget);
    return n;
}

} // namespace dimerloops
