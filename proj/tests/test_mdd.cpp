#include "dimerloops/mdd.hpp"
#include "dimerloops/transfer_matrix.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <vector>

using namespace dimerloops;

namespace {

Vertex at(const TorusLattice& lat, int x, int y)
{
    return lat.vertex_at(std::vector<int>{x, y});
}

Rational rat(const char* s) { return parse_rational(s); }

} // namespace

TEST_CASE("config weights")
{
    auto lat = TorusLattice::cubic(2, 4);
    auto full = enumerate_covers(lat, {});
    auto cfg = make_loop_config(full[0], full[0]); // all loops doubled edges
    REQUIRE(cfg.loop_count == 8);
    REQUIRE(mdd_weight(cfg, 2, Rational(1, 2)) == 1);
    REQUIRE(mdd_weight(cfg, 1, Rational(0)) == Rational(1, 256));

    // two monomers, both covers equal: 7 doubled edges
    std::vector<Vertex> m{0, at(lat, 1, 0)};
    auto ms = enumerate_covers(lat, m);
    auto cfg2 = make_loop_config(ms[0], ms[0]);
    REQUIRE(cfg2.loop_count == 7);
    REQUIRE(cfg2.monomers == m);
    REQUIRE(mdd_weight(cfg2, 2, Rational(1, 2)) == Rational(1, 4));

    REQUIRE_THROWS_AS(mdd_weight(cfg2, 0, Rational(1)), std::invalid_argument);
    REQUIRE_THROWS_AS(mdd_weight(cfg2, 2, Rational(-1)), std::invalid_argument);
}

TEST_CASE("walk config decomposition")
{
    auto lat = TorusLattice::cubic(2, 4);
    const Vertex e1 = at(lat, 1, 0);
    std::vector<Vertex> oe1{0, e1};
    auto d1s = enumerate_covers(lat, oe1);
    auto d2s = enumerate_covers(lat, {});
    auto cfg = make_walk_config(d1s[0], d2s[0], 0, e1);
    REQUIRE(cfg.walk.front() == 0);
    REQUIRE(cfg.walk.back() == e1);
    // the walk leaves the origin along its d2 edge
    REQUIRE(d2s[0].partner[0] == cfg.walk[1]);
    REQUIRE(cfg.monomers.empty());
    REQUIRE(cfg.walk.size() % 2 == 0); // opposite-parity endpoints
    REQUIRE(cfg.loop_count >= 1);
}

TEST_CASE("partition functions at rho=0 reduce to cover counts")
{
    auto lat = TorusLattice::cubic(2, 4);
    const Vertex e1 = at(lat, 1, 0);
    REQUIRE(partition_function(lat, 2, Rational(0), EnsembleSel::loop()) == BigInt(272) * 272);
    REQUIRE(partition_function(lat, 2, Rational(0), EnsembleSel::walk(0, e1)) == 68 * 272);
    // Omega(o,o) needs a monomer on the odd sublattice: empty at rho = 0
    REQUIRE(partition_function(lat, 2, Rational(0), EnsembleSel::walk(0, 0)) == 0);
    // equal-parity endpoints: the alternating walk cannot exist
    REQUIRE(partition_function(lat, 2, Rational(1, 2), EnsembleSel::walk(0, at(lat, 1, 1))) == 0);
}

TEST_CASE("two-point reductions at (N=2, rho=0)")
{
    auto lat = TorusLattice::cubic(2, 4);
    auto table = correlation_table(lat, 2, Rational(0));
    BigInt d_empty = count_covers(lat, {});
    for (Vertex x = 1; x < lat.vertex_count(); ++x) {
        std::vector<Vertex> ex{0, x};
        REQUIRE(table.g(x) == Rational(count_covers(lat, ex), d_empty));
    }
    REQUIRE(table.g(0) == 0);
    REQUIRE(table.g(at(lat, 1, 0)) == Rational(1, 4));
    REQUIRE(table.g(at(lat, 1, 0)) == edge_probability(lat, 0, at(lat, 1, 0)));
    REQUIRE(cesaro_sum(table) == Rational(29, 272));
}

TEST_CASE("frozen goldens for the (N, rho) grid at 4x4")
{
    auto lat = TorusLattice::cubic(2, 4);
    const Vertex e1 = at(lat, 1, 0);

    struct Row {
        int N;
        const char* rho;
        const char* g_e1;
        const char* p_tilde;
    };
    const Row rows[] = {
        {1, "0", "1/2", "0"},
        {1, "1/4", "2370948337424/4857493709625", "115597034777/4857493709625"},
        {1, "1/2", "57148156/123958329", "9662017/123958329"},
        {2, "0", "1/4", "0"},
        {2, "1/4", "10340672921488/42280944386105", "918252700153/42280944386105"},
        {2, "1/2", "240598948/1038067385", "75671593/1038067385"},
    };
    for (const auto& r : rows) {
        Rational rho = rat(r.rho);
        Rational g = two_point(lat, r.N, rho, e1);
        Rational pt = monomer_probability_loop_ensemble(lat, r.N, rho);
        REQUIRE(g == rat(r.g_e1));
        REQUIRE(pt == rat(r.p_tilde));
        // loop-ensemble identity: G(e1) = (1/(dN)) (1 - P(o is a monomer))
        REQUIRE(g == Rational(1, 2 * r.N) * (1 - pt));
        // Chessboard consequence and the resulting lower bound
        REQUIRE(pt <= rho);
        REQUIRE(g >= Rational(1, 2 * r.N) * (1 - rho));
        REQUIRE(g <= Rational(1, 2 * r.N));
    }
}

TEST_CASE("cesaro goldens")
{
    auto lat = TorusLattice::cubic(2, 4);
    REQUIRE(cesaro_sum(correlation_table(lat, 2, Rational(1, 2))) ==
            rat("2735005843/24913617240"));
    REQUIRE(cesaro_sum(correlation_table(lat, 1, Rational(1, 2))) == rat("75225555/330555544"));
}

TEST_CASE("walk endpoint law at (N=2, rho=1/2)")
{
    auto lat = TorusLattice::cubic(2, 4);
    auto law = walk_endpoint_law(lat, 2, Rational(1, 2));
    Rational total = 0;
    for (const auto& p : law) total += p;
    REQUIRE(total == 1);
    REQUIRE(law[0] == rat("227014779/2735005843"));
    REQUIRE(law[at(lat, 1, 0)] == rat("360898422/2735005843"));
    REQUIRE(law[at(lat, 2, 1)] == rat("266099344/2735005843"));
    // walk parity: even endpoints other than the origin are unreachable
    for (Vertex x = 1; x < lat.vertex_count(); ++x)
        if (lat.even_vertex(x)) REQUIRE(law[x] == 0);
}

TEST_CASE("endpoint law at rho=0 has no mass at the origin")
{
    auto lat = TorusLattice::cubic(2, 4);
    auto law = walk_endpoint_law(lat, 2, Rational(0));
    REQUIRE(law[0] == 0);
    Rational total = 0;
    for (const auto& p : law) total += p;
    REQUIRE(total == 1);
}

TEST_CASE("tail functional identity: P(|X|_1 <= r) from the correlation table")
{
    auto lat = TorusLattice::cubic(2, 4);
    const Rational rho(1, 2);
    auto table = correlation_table(lat, 2, rho);
    auto law = walk_endpoint_law(lat, 2, rho);
    Rational g_total = 0;
    for (const auto& g : table.values) g_total += g;
    for (int r : {0, 1, 2, 3}) {
        Rational lhs = 0, rhs = 0;
        for (Vertex x = 0; x < lat.vertex_count(); ++x) {
            if (lat.l1_distance(0, x) > r) continue;
            lhs += law[x];
            rhs += table.g(x);
        }
        REQUIRE(lhs == rhs / g_total);
    }
}

TEST_CASE("G symmetry under negation and axis swap")
{
    auto lat = TorusLattice::cubic(2, 4);
    auto table = correlation_table(lat, 2, Rational(1, 2));
    for (Vertex x = 0; x < lat.vertex_count(); ++x) {
        REQUIRE(table.g(x) == table.g(lat.negate(x)));
        auto c = lat.coords(x);
        std::swap(c[0], c[1]);
        REQUIRE(table.g(x) == table.g(lat.vertex_at(c)));
    }
}

TEST_CASE("budget guards for sweeps")
{
    auto big = TorusLattice::cubic(2, 6);
    MddSweepBudget b; // defaults: 16 for full sweeps, 36 at rho=0
    REQUIRE_THROWS_AS(loop_ensemble_histogram(big, /*rho_zero=*/false, 0, b), budget_exceeded);
    auto huge = TorusLattice::cubic(3, 4);
    REQUIRE_THROWS_AS(loop_ensemble_histogram(huge, true, 0, b), budget_exceeded);
}
