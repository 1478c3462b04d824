#pragma once

// Test-side oracles, kept independent of the library's implementation paths:
// matchings are counted by naive recursion over edge subsets (the library
// branches on vertices and contracts transfer matrices), and connectivity is
// decided by union-find (the library traces alternating loops).

#include "dimerloops/rational.hpp"
#include "dimerloops/torus_lattice.hpp"

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace test_oracle {

using dimerloops::BigInt;
using dimerloops::TorusLattice;
using dimerloops::Vertex;

inline BigInt count_matchings_edge_recursion(const TorusLattice& lat,
                                             std::span<const Vertex> excluded)
{
    const int V = lat.vertex_count();
    if (V > 63) throw std::invalid_argument("oracle limited to 63 vertices");
    auto edges = lat.edges();
    const int E = static_cast<int>(edges.size());

    // last edge index touching each vertex, for dead-branch detection
    std::vector<int> last_edge(V, -1);
    for (int i = 0; i < E; ++i) {
        last_edge[edges[i].first] = i;
        last_edge[edges[i].second] = i;
    }

    std::uint64_t covered = 0;
    for (Vertex v : excluded) covered |= std::uint64_t{1} << v;
    const std::uint64_t full = (V == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << V) - 1);

    BigInt total = 0;
    // iterative stack of (edge index, covered mask)
    struct Frame {
        int i;
        std::uint64_t covered;
    };
    std::vector<Frame> stack{{0, covered}};
    while (!stack.empty()) {
        auto [i, cov] = stack.back();
        stack.pop_back();
        if (cov == full) {
            ++total;
            continue;
        }
        if (i == E) continue;
        std::uint64_t uncovered = ~cov & full;
        Vertex lowest = static_cast<Vertex>(std::countr_zero(uncovered));
        if (last_edge[lowest] < i) continue; // lowest uncovered vertex starved
        auto [a, b] = edges[i];
        stack.push_back({i + 1, cov}); // skip edge i
        std::uint64_t am = std::uint64_t{1} << a, bm = std::uint64_t{1} << b;
        if (!(cov & am) && !(cov & bm)) stack.push_back({i + 1, cov | am | bm});
    }
    return total;
}

inline int dsu_find(std::vector<int>& parent, int a)
{
    while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    return a;
}

// Connectivity in the superposition multigraph via union-find.
inline bool dsu_connected(std::span<const Vertex> p1, std::span<const Vertex> p2, Vertex x,
                          Vertex y)
{
    const int n = static_cast<int>(p1.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (int v = 0; v < n; ++v) {
        for (auto p : {p1[v], p2[v]}) {
            if (p < 0) continue;
            int ra = dsu_find(parent, v), rb = dsu_find(parent, p);
            if (ra != rb) parent[ra] = rb;
        }
    }
    return dsu_find(parent, x) == dsu_find(parent, y);
}

inline int dsu_component_size(std::span<const Vertex> p1, std::span<const Vertex> p2, Vertex x)
{
    const int n = static_cast<int>(p1.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (int v = 0; v < n; ++v) {
        for (auto p : {p1[v], p2[v]}) {
            if (p < 0) continue;
            int ra = dsu_find(parent, v), rb = dsu_find(parent, p);
            if (ra != rb) parent[ra] = rb;
        }
    }
    int root = dsu_find(parent, x), size = 0;
    for (int v = 0; v < n; ++v)
        if (dsu_find(parent, v) == root) ++size;
    return size;
}

} // namespace test_oracle
