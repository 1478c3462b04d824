#include "dimerloops/enumerate.hpp"
#include "dimerloops/loops.hpp"
#include "dimerloops/stats.hpp"
#include "dimerloops/worm.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <string>

using namespace dimerloops;

TEST_CASE("worm moves keep at most one defect pair and stay on lattice edges")
{
    auto lat = TorusLattice::cubic(2, 4);
    WormState w(lat, 7);
    for (int i = 0; i < 20000; ++i) {
        w.step();
        if (i % 100 != 0) continue;
        auto p = w.partner();
        int defects = 0;
        for (Vertex v = 0; v < lat.vertex_count(); ++v) {
            if (p[v] == kNoVertex) {
                ++defects;
                continue;
            }
            REQUIRE(p[p[v]] == v);
            REQUIRE(lat.adjacent(v, p[v]));
        }
        REQUIRE((defects == 0 || defects == 2));
        REQUIRE((defects == 0) == w.diagonal());
    }
}

TEST_CASE("closing from an adjacent defect pair restores a valid matching")
{
    auto lat = TorusLattice::cubic(2, 4);
    WormState w(lat, 3);
    std::uint64_t before = w.closures();
    while (w.closures() == before) w.step();
    REQUIRE(w.diagonal());
    Matching m(lat, std::vector<Vertex>(w.partner().begin(), w.partner().end()));
    m.validate();
}

TEST_CASE("metropolis acceptance matches the proposal-probability ratio")
{
    auto lat = TorusLattice::cubic(2, 4);
    const double V = lat.vertex_count();
    const double deg = lat.full_degree();
    for (double w : {0.02, deg / V, 1.7}) {
        WormState ws(lat, 1, 0, w);
        // detailed balance: A_open / A_close = w |V| / (2d)
        double lhs = ws.open_acceptance() / ws.close_acceptance();
        REQUIRE(lhs == Catch::Approx(w * V / deg).epsilon(1e-12));
        REQUIRE(ws.open_acceptance() <= 1.0);
        REQUIRE(ws.close_acceptance() <= 1.0);
        REQUIRE(std::max(ws.open_acceptance(), ws.close_acceptance()) == 1.0);
    }
    // default defect weight makes the chain rejection-free
    WormState def(lat, 1);
    REQUIRE(def.open_acceptance() == 1.0);
    REQUIRE(def.close_acceptance() == 1.0);
}

TEST_CASE("C4 sampling is uniform over its two covers")
{
    auto lat = TorusLattice::cubic(1, 4);
    CoverStream stream(lat, 11, default_burn_in_closures(lat), default_thin_closures(lat));
    int first = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        auto p = stream.next();
        first += (p[0] == 1);
    }
    // symmetry forces 1/2 each; 3 sigma with sigma = sqrt(n/4)
    REQUIRE(std::fabs(first - n / 2.0) <= 3.0 * std::sqrt(n / 4.0));
}

TEST_CASE("seeded determinism and stream independence")
{
    auto lat = TorusLattice::cubic(2, 4);
    CoverStream a(lat, 42, 100, 4), b(lat, 42, 100, 4), c(lat, 43, 100, 4);
    bool all_equal = true, any_diff_seed = false;
    for (int i = 0; i < 50; ++i) {
        auto pa = a.next(), pb = b.next(), pc = c.next();
        if (!std::equal(pa.begin(), pa.end(), pb.begin())) all_equal = false;
        if (!std::equal(pa.begin(), pa.end(), pc.begin())) any_diff_seed = true;
    }
    REQUIRE(all_equal);
    REQUIRE(any_diff_seed);
}

TEST_CASE("4x4 chi-square against the exact 272-cover support")
{
    auto lat = TorusLattice::cubic(2, 4);
    auto covers = collect_covers(lat, {});
    std::map<std::vector<Vertex>, std::size_t> index;
    for (std::size_t i = 0; i < covers.size(); ++i) {
        auto r = covers[i];
        index[std::vector<Vertex>(r.begin(), r.end())] = i;
    }
    std::vector<std::uint64_t> hits(covers.size(), 0);
    CoverStream stream(lat, 5, default_burn_in_closures(lat), default_thin_closures(lat));
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        auto p = stream.next();
        auto it = index.find(std::vector<Vertex>(p.begin(), p.end()));
        REQUIRE(it != index.end()); // every sample is a genuine cover
        ++hits[it->second];
    }
    auto chi = chi_square_uniform(hits);
    REQUIRE(chi.p_value > 0.001);
}

TEST_CASE("edge frequency matches 1/(2d) within 3 sigma")
{
    auto lat = TorusLattice::cubic(2, 4);
    CoverStream stream(lat, 19, default_burn_in_closures(lat), default_thin_closures(lat));
    const Vertex e1 = lat.axis_point(1, 1);
    const int n = 20000;
    int occ = 0;
    for (int i = 0; i < n; ++i) occ += (stream.next()[0] == e1);
    double p = 0.25, sigma = std::sqrt(p * (1 - p) / n);
    REQUIRE(std::fabs(occ / static_cast<double>(n) - p) <= 3.0 * sigma);
}

TEST_CASE("double-dimer stats at 4x4 agree with the exact values")
{
    auto lat = TorusLattice::cubic(2, 4);
    DoubleDimerSampleOptions opts;
    opts.connection_targets = {1};
    auto rs = sample_double_dimer_stats(lat, 8000, 123, opts);
    const auto& density = rs.observable("loop_density");
    const auto& conn = rs.observable("conn_1e1");
    const auto& edge = rs.observable("edge_occupancy");
    REQUIRE(std::fabs(density.mean - 3967.0 / 9248.0) <= 3.0 * density.std_error);
    REQUIRE(std::fabs(conn.mean - 155.0 / 272.0) <= 3.0 * conn.std_error);
    REQUIRE(std::fabs(edge.mean - 0.25) <= 3.0 * edge.std_error);
    REQUIRE(density.tau_int >= 0.5);
    REQUIRE(rs.n_samples == 8000);
}

TEST_CASE("multi-chain runs merge deterministically")
{
    auto lat = TorusLattice::cubic(2, 4);
    DoubleDimerSampleOptions opts;
    opts.chains = 2;
    auto a = sample_double_dimer_stats(lat, 2000, 7, opts);
    auto b = sample_double_dimer_stats(lat, 2000, 7, opts);
    REQUIRE(a.observable("loop_density").mean == b.observable("loop_density").mean);
    REQUIRE(a.observable("loop_density").std_error == b.observable("loop_density").std_error);
}

TEST_CASE("degenerate lattices are rejected")
{
    TorusLattice deg(2, {4, 2});
    REQUIRE_THROWS_AS(WormState(deg, 1), std::invalid_argument);
}
