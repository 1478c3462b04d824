#include "dimerloops/torus_lattice.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <deque>
#include <set>

using namespace dimerloops;

namespace {

std::vector<int> bfs_distances(const TorusLattice& lat, Vertex from)
{
    std::vector<int> dist(lat.vertex_count(), -1);
    std::deque<Vertex> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        Vertex v = q.front();
        q.pop_front();
        for (Vertex w : lat.neighbors(v))
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
    }
    return dist;
}

} // namespace

TEST_CASE("cycle torus")
{
    auto lat = TorusLattice::cubic(1, 4);
    REQUIRE(lat.vertex_count() == 4);
    for (Vertex v = 0; v < 4; ++v) REQUIRE(lat.neighbors(v).size() == 2);
    REQUIRE_FALSE(lat.degenerate());
}

TEST_CASE("4x4 torus counts")
{
    auto lat = TorusLattice::cubic(2, 4);
    REQUIRE(lat.vertex_count() == 16);
    REQUIRE(lat.edges().size() == 32); // |E| = d |V|
    for (Vertex v = 0; v < 16; ++v) REQUIRE(lat.neighbors(v).size() == 4);
}

TEST_CASE("4x4x4 bipartite split")
{
    auto lat = TorusLattice::cubic(3, 4);
    REQUIRE(lat.vertex_count() == 64);
    REQUIRE(lat.sublattice(Parity::even).size() == 32);
    REQUIRE(lat.sublattice(Parity::odd).size() == 32);
}

TEST_CASE("odd side rejected")
{
    REQUIRE_THROWS_AS(TorusLattice::cubic(2, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(TorusLattice(2, {4, 3}), std::invalid_argument);
    REQUIRE_THROWS_AS(TorusLattice(2, {4}), std::invalid_argument);
    REQUIRE_THROWS_AS(TorusLattice(0, {}), std::invalid_argument);
}

TEST_CASE("per-axis sides allowed, side 2 tagged degenerate")
{
    TorusLattice lat(2, {4, 6});
    REQUIRE(lat.vertex_count() == 24);
    TorusLattice deg(3, {4, 4, 2});
    REQUIRE(deg.degenerate());
    // collapsed axis: degree drops below 2d
    REQUIRE(deg.neighbors(0).size() == 5);
}

TEST_CASE("sublattice examples")
{
    auto c4 = TorusLattice::cubic(1, 4);
    auto ev = c4.sublattice(Parity::even);
    REQUIRE(ev == std::vector<Vertex>{0, 2});

    auto lat = TorusLattice::cubic(2, 4);
    REQUIRE(lat.sublattice(Parity::odd).size() == 8);
    for (Vertex v : lat.sublattice(Parity::odd)) {
        auto c = lat.coords(v);
        REQUIRE((c[0] + c[1]) % 2 == 1);
    }
}

TEST_CASE("axis_point examples")
{
    auto lat = TorusLattice::cubic(2, 4);
    REQUIRE(lat.axis_point(1, 1) == lat.vertex_at(std::vector<int>{1, 0}));
    REQUIRE(lat.axis_point(-1, 1) == lat.vertex_at(std::vector<int>{3, 0}));
    REQUIRE(lat.axis_point(4, 2) == 0); // periodicity
    REQUIRE(lat.axis_point(0, 1) == 0);
}

TEST_CASE("neighbor relation is symmetric")
{
    for (auto lat : {TorusLattice::cubic(2, 4), TorusLattice(2, {4, 6}), TorusLattice(3, {4, 4, 2})}) {
        for (Vertex v = 0; v < lat.vertex_count(); ++v)
            for (Vertex w : lat.neighbors(v)) {
                auto back = lat.neighbors(w);
                REQUIRE(std::find(back.begin(), back.end(), v) != back.end());
            }
    }
}

TEST_CASE("l1 distance equals BFS graph distance")
{
    for (auto lat : {TorusLattice::cubic(2, 4), TorusLattice::cubic(2, 6), TorusLattice::cubic(3, 4)}) {
        auto dist = bfs_distances(lat, 0);
        for (Vertex v = 0; v < lat.vertex_count(); ++v)
            REQUIRE(dist[v] == lat.l1_distance(0, v));
    }
}

TEST_CASE("parity of graph distance matches coordinate-sum parity")
{
    auto lat = TorusLattice::cubic(2, 4);
    auto dist = bfs_distances(lat, 0);
    for (Vertex v = 0; v < lat.vertex_count(); ++v)
        REQUIRE((dist[v] % 2 == 0) == lat.even_vertex(v));
}

TEST_CASE("translations are graph automorphisms")
{
    auto lat = TorusLattice::cubic(2, 4);
    for (Vertex t = 0; t < lat.vertex_count(); ++t) {
        for (Vertex v = 0; v < lat.vertex_count(); ++v) {
            std::set<Vertex> a, b;
            for (Vertex w : lat.neighbors(lat.translate(v, t))) a.insert(w);
            for (Vertex w : lat.neighbors(v)) b.insert(lat.translate(w, t));
            REQUIRE(a == b);
        }
    }
}
