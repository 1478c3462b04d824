// dimerloops: exact and Monte Carlo tools for dimer covers, double-dimer
// loops, and the monomer double-dimer model on d-dimensional tori.
//
// Exit codes: 0 success / all assertions passed, 1 assertion failure,
// 2 usage or input error.

#include "dimerloops/constants.hpp"
#include "dimerloops/enumerate.hpp"
#include "dimerloops/errors.hpp"
#include "dimerloops/green.hpp"
#include "dimerloops/loops.hpp"
#include "dimerloops/mdd.hpp"
#include "dimerloops/rational.hpp"
#include "dimerloops/spectral.hpp"
#include "dimerloops/transfer_matrix.hpp"
#include "dimerloops/verify.hpp"
#include "dimerloops/worm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::json;
using namespace dimerloops;

namespace {

constexpr const char* kVersion = "0.2.0";

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct Shared {
    int d = 2;
    int L = 4;
    std::vector<int> sides;
    int threads = 0;
    std::string command_line;
};

TorusLattice make_lattice(const Shared& g, bool theorem_grade = false)
{
    TorusLattice lat = g.sides.empty() ? TorusLattice::cubic(g.d, g.L)
                                       : TorusLattice(static_cast<int>(g.sides.size()), g.sides);
    if (theorem_grade) {
        if (lat.degenerate())
            throw CLI::ValidationError("--L", "theorem-grade commands need all sides >= 4");
        for (std::size_t i = 1; i < lat.sides().size(); ++i)
            if (lat.sides()[i] != lat.sides()[0])
                throw CLI::ValidationError("--sides", "theorem-grade commands need a cubic torus");
    }
    return lat;
}

json lattice_json(const TorusLattice& lat)
{
    return json{{"d", lat.dim()}, {"sides", lat.sides()}};
}

json manifest_json(const Shared& g, const json& config, double wall_seconds,
                   const json& assertions = json::array())
{
    return json{{"command_line", g.command_line},
                {"config", config},
                {"version", kVersion},
                {"wall_time_seconds", wall_seconds},
                {"assertions", assertions}};
}

std::vector<Vertex> parse_vertices(const TorusLattice& lat, const std::string& text)
{
    std::vector<Vertex> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string tuple;
    while (std::getline(ss, tuple, ';')) {
        std::stringstream ts(tuple);
        std::string coord;
        std::vector<int> c;
        while (std::getline(ts, coord, ',')) c.push_back(std::stoi(coord));
        out.push_back(lat.vertex_at(c));
    }
    return out;
}

std::string coord_key(const TorusLattice& lat, Vertex v)
{
    auto c = lat.coords(v);
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    return s;
}

void emit(const json& result) { std::cout << result.dump(1) << std::endl; }

json run_stats_json(const RunStats& rs)
{
    json obs = json::object();
    for (const auto& o : rs.observables)
        obs[o.name] = {{"mean", o.mean}, {"std_error", o.std_error}, {"tau_int", o.tau_int}};
    return json{{"n_samples", rs.n_samples},
                {"burn_in_closures", rs.burn_in_closures},
                {"thin_closures", rs.thin_closures},
                {"seed", rs.seed},
                {"chains", rs.chains},
                {"observables", obs}};
}

std::uint64_t parse_auto(const std::string& text, std::uint64_t fallback)
{
    if (text == "auto" || text.empty()) return fallback;
    return std::stoull(text);
}

json check_json(const verify::CheckResult& r)
{
    return json{{"id", r.id},         {"name", r.name},       {"status", r.status},
                {"detail", r.detail}, {"seconds", r.seconds}};
}

int run_suite(const Shared& g, const std::string& name, const std::string& out_dir)
{
    std::vector<int> ids;
    if (name == "theorem1-exact") ids = verify::kTheorem1Exact;
    else if (name == "theorem2-exact") ids = verify::kTheorem2Exact;
    else if (name == "analysis") ids = verify::kAnalysis;
    else if (name == "theorem1-mcmc") ids = verify::kTheorem1Mcmc;
    else if (name == "all") ids = verify::kAll;
    else {
        std::cerr << "unknown suite '" << name
                  << "' (theorem1-exact | theorem1-mcmc | theorem2-exact | analysis | all)\n";
        return 2;
    }

    Timer t;
    verify::Options vopts;
    vopts.threads = g.threads;
    auto results = verify::run_checks(ids, vopts);

    json jr = json::array();
    int failures = 0;
    std::ostringstream human;
    for (const auto& r : results) {
        jr.push_back(check_json(r));
        char line[160];
        std::snprintf(line, sizeof line, "criterion %2d [%s] %-34s (%.1fs)\n", r.id,
                      r.status.c_str(), r.name.c_str(), r.seconds);
        human << line << "    " << r.detail << "\n";
        if (r.status == "FAIL") ++failures;
        std::cout << line;
    }
    json result{{"suite", name},
                {"results", jr},
                {"failures", failures},
                {"manifest", manifest_json(g, json{{"suite", name}}, t.seconds(), jr)}};

    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir + "/" + name + ".json") << result.dump(1) << "\n";
    std::ofstream(out_dir + "/" + name + ".txt") << human.str();
    std::cout << (failures ? "FAIL" : "PASS") << " (" << results.size() - failures << "/"
              << results.size() << "), reports in " << out_dir << "\n";
    return failures ? 1 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    Shared g;
    for (int i = 0; i < argc; ++i) {
        if (i) g.command_line += " ";
        g.command_line += argv[i];
    }

    CLI::App app{"double dimer and monomer double-dimer models on discrete tori"};
    app.set_config("--config", "", "key=value config file; flags override it");
    app.add_option("--threads", g.threads, "worker threads (0 = all hardware threads)")
        ->capture_default_str();
    app.require_subcommand(1);

    auto add_lattice_opts = [&](CLI::App* cmd) {
        cmd->add_option("--d", g.d, "dimension")->capture_default_str();
        cmd->add_option("--L", g.L, "cubic side length (even)")->capture_default_str();
        cmd->add_option("--sides", g.sides, "per-axis side lengths (testing only)")
            ->delimiter(',');
    };

    std::string exclude_text;
    auto* count_cmd = app.add_subcommand("count", "exact |D(A)| via the transfer matrix");
    add_lattice_opts(count_cmd);
    count_cmd->add_option("--exclude", exclude_text,
                          "excluded vertices, e.g. \"0,0;1,0\" (semicolon-separated)");

    auto* ddm_cmd = app.add_subcommand("ddm", "double dimer model");
    auto* ddm_stats = ddm_cmd->add_subcommand("stats", "loop statistics");
    std::string ddm_mode = "exact";
    std::uint64_t mc_samples = 10000, mc_seed = 42;
    int mc_chains = 1;
    add_lattice_opts(ddm_stats);
    ddm_stats->add_option("--mode", ddm_mode, "exact | mcmc")->capture_default_str();
    ddm_stats->add_option("--samples", mc_samples, "MCMC samples")->capture_default_str();
    ddm_stats->add_option("--seed", mc_seed, "MCMC seed")->capture_default_str();
    ddm_stats->add_option("--chains", mc_chains, "independent chain pairs")->capture_default_str();

    auto* mdd_cmd = app.add_subcommand("mdd", "monomer double-dimer model");
    int mdd_N = 2;
    std::string mdd_rho = "0";
    std::string mdd_x;
    auto add_mdd_opts = [&](CLI::App* cmd) {
        add_lattice_opts(cmd);
        cmd->add_option("--N", mdd_N, "loop-number weight (positive integer)")
            ->capture_default_str();
        cmd->add_option("--rho", mdd_rho, "monomer activity, rational \"p/q\" or decimal")
            ->capture_default_str();
    };
    auto* mdd_twopoint = mdd_cmd->add_subcommand("twopoint", "two-point function G(o,x)");
    add_mdd_opts(mdd_twopoint);
    mdd_twopoint->add_option("--x", mdd_x, "single target vertex \"x1,x2,..\" (default: table)");
    auto* mdd_cesaro = mdd_cmd->add_subcommand("cesaro", "volume average of G");
    add_mdd_opts(mdd_cesaro);
    auto* mdd_law = mdd_cmd->add_subcommand("endpoint-law", "law of the walk endpoint X");
    add_mdd_opts(mdd_law);

    auto* sample_cmd = app.add_subcommand("sample", "MCMC sampling");
    auto* sample_ddm = sample_cmd->add_subcommand("ddm", "double-dimer sampling via worm chains");
    std::string burnin_text = "auto", thin_text = "auto", csv_path;
    add_lattice_opts(sample_ddm);
    sample_ddm->add_option("--samples", mc_samples, "number of double-dimer samples")
        ->capture_default_str();
    sample_ddm->add_option("--seed", mc_seed, "seed")->capture_default_str();
    sample_ddm
        ->add_option("--burnin", burnin_text, "worm closures before sampling, or auto (100|V|)")
        ->capture_default_str();
    sample_ddm->add_option("--thin", thin_text, "closures between samples, or auto (|V|)")
        ->capture_default_str();
    sample_ddm->add_option("--chains", mc_chains, "independent chain pairs")
        ->capture_default_str();
    sample_ddm->add_option("--csv", csv_path, "stream per-sample observables to CSV");

    auto* verify_cmd = app.add_subcommand("verify", "analytic identities and constructions");
    int upsilon_lmax = 64, leibniz_mmax = 4000, injection_L = 4;
    auto* v_upsilon = verify_cmd->add_subcommand("upsilon", "Fourier sum vs closed form");
    v_upsilon->add_option("--Lmax", upsilon_lmax, "largest side length")->capture_default_str();
    auto* v_leibniz = verify_cmd->add_subcommand("leibniz", "cot-difference series limit");
    v_leibniz->add_option("--mmax", leibniz_mmax, "largest m")->capture_default_str();
    auto* v_injection = verify_cmd->add_subcommand("injection", "exhaustive injection check");
    v_injection->add_option("--L", injection_L, "side length (d=2)")->capture_default_str();
    auto* v_identities =
        verify_cmd->add_subcommand("identities", "exact loop/two-point/chessboard identities");
    auto* v_infrared = verify_cmd->add_subcommand(
        "infrared", "asymptotic infrared diagnostic at rho=0, N=2 (slow: exact d=3 counts)");
    add_lattice_opts(v_infrared);

    auto* rd_cmd = app.add_subcommand("rd", "returns of simple random walk on Z^d");
    int rd_d = 3;
    std::string rd_method = "quad";
    std::uint64_t rd_walks = 1000000, rd_horizon = 40000, rd_seed = 42;
    rd_cmd->add_option("--d", rd_d, "dimension (>= 3)")->capture_default_str();
    rd_cmd->add_option("--method", rd_method, "quad | mc")->capture_default_str();
    rd_cmd->add_option("--walks", rd_walks, "MC walks")->capture_default_str();
    rd_cmd->add_option("--horizon", rd_horizon, "MC steps per walk")->capture_default_str();
    rd_cmd->add_option("--seed", rd_seed, "MC seed")->capture_default_str();

    auto* constants_cmd = app.add_subcommand("constants", "bound constants for given d, N, rho");
    int c_d = 3, c_N = 2;
    double c_rho = 0.0;
    constants_cmd->add_option("--d", c_d, "dimension (>= 3)")->capture_default_str();
    constants_cmd->add_option("--N", c_N, "loop-number weight")->capture_default_str();
    constants_cmd->add_option("--rho", c_rho, "monomer activity")->capture_default_str();

    auto* suite_cmd = app.add_subcommand("suite", "run an assertion suite");
    std::string suite_name = "all", out_dir = "out";
    suite_cmd->add_option("name", suite_name,
                          "theorem1-exact | theorem1-mcmc | theorem2-exact | analysis | all");
    suite_cmd->add_option("--out", out_dir, "report directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        Timer t;
        if (*count_cmd) {
            auto lat = make_lattice(g);
            auto excluded = parse_vertices(lat, exclude_text);
            BigInt n = count_covers(lat, excluded, TransferOptions{.threads = g.threads});
            json ex = json::array();
            for (Vertex v : excluded) ex.push_back(coord_key(lat, v));
            emit(json{{"count", to_string(n)},
                      {"lattice", lattice_json(lat)},
                      {"exclude", ex},
                      {"manifest", manifest_json(g, json{{"exclude", exclude_text}}, t.seconds())}});
            return 0;
        }

        if (*ddm_stats) {
            auto lat = make_lattice(g, /*theorem_grade=*/true);
            if (ddm_mode == "exact") {
                auto stats = exact_double_dimer_stats(lat, g.threads);
                json conn = json::object();
                for (Vertex x = 0; x < lat.vertex_count(); ++x)
                    conn[coord_key(lat, x)] = to_string(stats.connection_probability(x));
                emit(json{{"mode", "exact"},
                          {"loop_density", to_string(stats.loop_density())},
                          {"connection_probs", conn},
                          {"lattice", lattice_json(lat)},
                          {"manifest", manifest_json(g, json{{"mode", ddm_mode}}, t.seconds())}});
            } else if (ddm_mode == "mcmc") {
                DoubleDimerSampleOptions opts;
                opts.chains = mc_chains;
                for (int n = 1; n <= lat.sides()[0] / 2; n += 2)
                    opts.connection_targets.push_back(n);
                auto rs = sample_double_dimer_stats(lat, mc_samples, mc_seed, opts);
                emit(json{{"mode", "mcmc"},
                          {"stats", run_stats_json(rs)},
                          {"lattice", lattice_json(lat)},
                          {"manifest", manifest_json(
                               g, json{{"mode", ddm_mode}, {"samples", mc_samples}, {"seed", mc_seed}},
                               t.seconds())}});
            } else {
                std::cerr << "unknown mode '" << ddm_mode << "'\n";
                return 2;
            }
            return 0;
        }

        if (*mdd_twopoint || *mdd_cesaro || *mdd_law) {
            auto lat = make_lattice(g);
            Rational rho = parse_rational(mdd_rho);
            json config{{"N", mdd_N}, {"rho", mdd_rho}};
            if (*mdd_twopoint && !mdd_x.empty()) {
                Vertex x = parse_vertices(lat, mdd_x).at(0);
                Rational gval = two_point(lat, mdd_N, rho, x, g.threads);
                emit(json{{"x", coord_key(lat, x)},
                          {"G", to_string(gval)},
                          {"lattice", lattice_json(lat)},
                          {"manifest", manifest_json(g, config, t.seconds())}});
                return 0;
            }
            if (*mdd_twopoint || *mdd_cesaro) {
                auto table = correlation_table(lat, mdd_N, rho, g.threads);
                json values = json::object();
                for (Vertex x = 0; x < lat.vertex_count(); ++x)
                    values[coord_key(lat, x)] = to_string(table.g(x));
                json result{{"lattice", lattice_json(lat)},
                            {"N", mdd_N},
                            {"rho", to_string(rho)},
                            {"Z_loop", to_string(table.z_loop)},
                            {"manifest", manifest_json(g, config, t.seconds())}};
                if (*mdd_cesaro) result["cesaro"] = to_string(cesaro_sum(table));
                if (*mdd_twopoint) result["G"] = values;
                emit(result);
                return 0;
            }
            auto law = walk_endpoint_law(lat, mdd_N, rho, g.threads);
            json values = json::object();
            for (Vertex x = 0; x < lat.vertex_count(); ++x)
                values[coord_key(lat, x)] = to_string(law[x]);
            emit(json{{"lattice", lattice_json(lat)},
                      {"N", mdd_N},
                      {"rho", to_string(rho)},
                      {"law", values},
                      {"manifest", manifest_json(g, config, t.seconds())}});
            return 0;
        }

        if (*sample_ddm) {
            auto lat = make_lattice(g, /*theorem_grade=*/true);
            DoubleDimerSampleOptions opts;
            opts.burn_in_closures = parse_auto(burnin_text, default_burn_in_closures(lat));
            opts.thin_closures = parse_auto(thin_text, default_thin_closures(lat));
            opts.chains = mc_chains;
            for (int n = 1; n <= lat.sides()[0] / 2; n += 2) opts.connection_targets.push_back(n);
            std::ofstream csv;
            if (!csv_path.empty()) {
                csv.open(csv_path);
                csv << "chain,sample,loop_length";
                for (int n : opts.connection_targets) csv << ",conn_" << n << "e1";
                csv << "\n";
                opts.sink = [&](int chain, std::uint64_t i, int len, std::span<const char> hits) {
                    csv << chain << "," << i << "," << len;
                    for (char h : hits) csv << "," << int(h);
                    csv << "\n";
                };
            }
            auto rs = sample_double_dimer_stats(lat, mc_samples, mc_seed, opts);
            emit(json{{"stats", run_stats_json(rs)},
                      {"lattice", lattice_json(lat)},
                      {"csv", csv_path},
                      {"manifest", manifest_json(
                           g, json{{"samples", mc_samples}, {"seed", mc_seed}, {"chains", mc_chains}},
                           t.seconds())}});
            return 0;
        }

        if (*v_upsilon) {
            double worst = 0.0;
            json rows = json::array();
            for (int L = 4; L <= upsilon_lmax; L += 2) {
                double wl = 0.0;
                for (int d : {2, 3})
                    for (int x1 = 0; x1 < L; x1 += 2)
                        wl = std::max(wl, std::fabs(upsilon_fourier(L, d, x1) -
                                                    upsilon_closed_form(L, d, x1)));
                rows.push_back(json{{"L", L}, {"max_abs_diff", wl}});
                worst = std::max(worst, wl);
            }
            bool pass = worst <= 1e-9;
            emit(json{{"pass", pass},
                      {"max_abs_diff", worst},
                      {"per_L", rows},
                      {"manifest", manifest_json(g, json{{"Lmax", upsilon_lmax}}, t.seconds())}});
            return pass ? 0 : 1;
        }

        if (*v_leibniz) {
            auto rep = leibniz_limit_check(leibniz_mmax);
            json rows = json::array();
            for (const auto& e : rep.entries)
                rows.push_back(json{{"m", e.m}, {"S_m", e.s_m}, {"error", e.error}});
            bool pass = rep.errors_decreasing && rep.final_error < 0.01;
            emit(json{{"pass", pass},
                      {"limit", rep.limit},
                      {"entries", rows},
                      {"errors_decreasing", rep.errors_decreasing},
                      {"final_error", rep.final_error},
                      {"manifest", manifest_json(g, json{{"mmax", leibniz_mmax}}, t.seconds())}});
            return pass ? 0 : 1;
        }

        if (*v_injection) {
            verify::Options vopts;
            vopts.threads = g.threads;
            auto results = verify::run_checks(std::vector<int>{2}, vopts);
            emit(json{{"pass", results[0].passed()},
                      {"result", check_json(results[0])},
                      {"manifest", manifest_json(g, json{{"L", injection_L}}, t.seconds())}});
            return results[0].passed() ? 0 : 1;
        }

        if (*v_identities) {
            verify::Options vopts;
            vopts.threads = g.threads;
            auto results = verify::run_checks(std::vector<int>{3, 5, 6}, vopts);
            json rows = json::array();
            bool pass = true;
            for (const auto& r : results) {
                rows.push_back(check_json(r));
                pass = pass && r.passed();
            }
            emit(json{{"pass", pass},
                      {"results", rows},
                      {"manifest", manifest_json(g, json::object(), t.seconds())}});
            return pass ? 0 : 1;
        }

        if (*v_infrared) {
            auto lat = make_lattice(g, /*theorem_grade=*/true);
            if (lat.dim() < 3)
                throw CLI::ValidationError("--d", "the r_d/(4d) diagnostic needs d >= 3");
            const int L = lat.sides()[0];
            TransferOptions topts{.threads = g.threads};
            BigInt d_empty = count_covers(lat, {}, topts);
            // at (N=2, rho=0) the two-point function reduces to count ratios;
            // even axis points vanish by sublattice parity
            Rational cesaro = 0;
            for (Vertex x = 1; x < lat.vertex_count(); ++x) {
                if (lat.even_vertex(x)) continue;
                std::vector<Vertex> ex{0, x};
                cesaro += Rational(count_covers(lat, ex, topts), d_empty);
            }
            cesaro /= lat.vertex_count();
            std::vector<Vertex> oe1{0, lat.axis_point(1, 1)};
            double g_e1 = to_double(Rational(count_covers(lat, oe1, topts), d_empty));
            std::vector<double> axis_g(L / 2, 0.0);
            auto rd = r_d_quadrature(lat.dim());
            double i_value = rd.value / (4.0 * lat.dim());
            double rhs = infrared_rhs(L, lat.dim(), g_e1, axis_g, i_value);
            emit(json{{"diagnostic", "asymptotic (uses lim I_L(d) = r_d/4d, not the finite-L value)"},
                      {"cesaro_lhs", to_double(cesaro)},
                      {"rhs", rhs},
                      {"G_e1", g_e1},
                      {"I_value", i_value},
                      {"lattice", lattice_json(lat)},
                      {"manifest", manifest_json(g, json{{"N", 2}, {"rho", "0"}}, t.seconds())}});
            return 0;
        }

        if (*rd_cmd) {
            if (rd_method == "quad") {
                auto est = r_d_quadrature(rd_d);
                emit(json{{"d", rd_d},
                          {"r_d", est.value},
                          {"error_bound", est.error_bound},
                          {"method", est.method},
                          {"manifest", manifest_json(g, json{{"method", rd_method}}, t.seconds())}});
            } else if (rd_method == "mc") {
                auto est = r_d_random_walk(rd_d, rd_walks, rd_horizon, rd_seed, g.threads);
                emit(json{{"d", rd_d},
                          {"r_d", est.value},
                          {"std_error", est.std_error},
                          {"truncation_bias_bound", est.truncation_bias_bound},
                          {"walks", est.n_walks},
                          {"horizon", est.horizon},
                          {"method", est.method},
                          {"manifest", manifest_json(
                               g, json{{"method", rd_method}, {"walks", rd_walks},
                                       {"horizon", rd_horizon}, {"seed", rd_seed}},
                               t.seconds())}});
            } else {
                std::cerr << "unknown method '" << rd_method << "' (quad | mc)\n";
                return 2;
            }
            return 0;
        }

        if (*constants_cmd) {
            auto b = bound_constants(c_d, c_N, c_rho);
            emit(json{{"d", b.d},
                      {"N", b.N},
                      {"rho", b.rho},
                      {"r_d", b.r_d},
                      {"r_d_error", b.r_d_error},
                      {"r_d_method", b.r_d_method},
                      {"C", b.C},
                      {"theorem1_lower", b.theorem1_lower},
                      {"theorem1_upper", b.theorem1_upper},
                      {"rho_threshold", b.rho_threshold},
                      {"N_range_max", b.n_range_max},
                      {"I_limit", b.i_limit},
                      {"in_range", b.in_range},
                      {"manifest", manifest_json(
                           g, json{{"d", c_d}, {"N", c_N}, {"rho", c_rho}}, t.seconds())}});
            return 0;
        }

        if (*suite_cmd) return run_suite(g, suite_name, out_dir);

        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const budget_exceeded& e) {
        std::cerr << "SKIPPED: " << e.what() << "\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
