#pragma once

#include "dimerloops/loops.hpp"
#include "dimerloops/matching.hpp"
#include "dimerloops/rng.hpp"
#include "dimerloops/stats.hpp"
#include "dimerloops/torus_lattice.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dimerloops {

// Worm (defect-pair) dynamics for uniform dimer covers. Plaquette rotations
// do not connect winding sectors on a torus; the wandering defect pair does.
//
// The chain lives on perfect matchings (weight 1) plus two-defect states
// (weight `defect_weight` each, ordered (tail, head)). Moves:
//   open:  from a matching, pick a uniform vertex u, cut the dimer {u, p(u)},
//          leaving tail = u, head = p(u);   proposal 1/|V|
//   shift: pick a uniform neighbor w of the head; if w != tail, cut {w, p(w)}
//          and add {head, w}; the head hops to p(w);   proposal 1/(2d), its own
//          reverse, so it is always accepted
//   close: if the picked neighbor is the tail, add {head, tail};   proposal 1/(2d)
// Detailed balance fixes A(open) = min(1, w |V| / 2d) and
// A(close) = min(1, 2d / (w |V|)); the default w = 2d/|V| makes both 1.
class WormState {
public:
    WormState(const TorusLattice& lat, std::uint64_t seed, std::uint64_t stream = 0,
              double defect_weight = 0.0)
        : lat_(&lat), rng_(make_engine(seed, stream))
    {
        if (lat.degenerate())
            throw std::invalid_argument("worm sampling needs a non-degenerate lattice (all sides >= 4, or >= 4 in 1d)");
        const Vertex n = lat.vertex_count();
        partner_.assign(n, kNoVertex);
        // brick pairing along axis 1 (side lengths are even)
        for (Vertex v = 0; v < n; ++v) {
            if (partner_[v] != kNoVertex) continue;
            Vertex w = lat.step(v, 0, +1);
            partner_[v] = w;
            partner_[w] = v;
        }
        const double deg = static_cast<double>(lat.full_degree());
        defect_weight_ = defect_weight > 0.0 ? defect_weight : deg / static_cast<double>(n);
        open_accept_ = std::min(1.0, defect_weight_ * static_cast<double>(n) / deg);
        close_accept_ = std::min(1.0, deg / (defect_weight_ * static_cast<double>(n)));
    }

    bool diagonal() const { return head_ == kNoVertex; }
    Vertex head() const { return head_; }
    Vertex tail() const { return tail_; }
    std::uint64_t steps() const { return steps_; }
    std::uint64_t accepted() const { return accepted_; }
    std::uint64_t closures() const { return closures_; }
    double open_acceptance() const { return open_accept_; }
    double close_acceptance() const { return close_accept_; }
    const TorusLattice& lattice() const { return *lat_; }

    // Valid only in the diagonal (zero-defect) state.
    std::span<const Vertex> partner() const { return partner_; }

    void step()
    {
        ++steps_;
        if (diagonal()) {
            Vertex u = static_cast<Vertex>(bounded(rng_, partner_.size()));
            if (open_accept_ >= 1.0 || uniform01(rng_) < open_accept_) {
                tail_ = u;
                head_ = partner_[u];
                partner_[u] = kNoVertex;
                partner_[head_] = kNoVertex;
                ++accepted_;
            }
            return;
        }
        auto ns = lat_->neighbors(head_);
        Vertex w = ns[bounded(rng_, ns.size())];
        if (w == tail_) {
            if (close_accept_ >= 1.0 || uniform01(rng_) < close_accept_) {
                partner_[head_] = tail_;
                partner_[tail_] = head_;
                head_ = tail_ = kNoVertex;
                ++closures_;
                ++accepted_;
            }
            return;
        }
        Vertex wp = partner_[w];
        partner_[w] = head_;
        partner_[head_] = w;
        partner_[wp] = kNoVertex;
        head_ = wp;
        ++accepted_;
    }

    void advance_closures(std::uint64_t k)
    {
        const std::uint64_t target = closures_ + k;
        while (closures_ < target) step();
    }

private:
    const TorusLattice* lat_;
    std::vector<Vertex> partner_;
    Vertex head_ = kNoVertex;
    Vertex tail_ = kNoVertex;
    std::mt19937_64 rng_;
    double defect_weight_ = 0.0;
    double open_accept_ = 1.0;
    double close_accept_ = 1.0;
    std::uint64_t steps_ = 0;
    std::uint64_t accepted_ = 0;
    std::uint64_t closures_ = 0;
};

inline std::uint64_t default_burn_in_closures(const TorusLattice& lat)
{
    return 100ULL * static_cast<std::uint64_t>(lat.vertex_count());
}

inline std::uint64_t default_thin_closures(const TorusLattice& lat)
{
    return static_cast<std::uint64_t>(lat.vertex_count());
}

// Stream of decorrelated covers from one worm chain: burn-in once, then
// `thin` closures between emitted matchings. Deterministic in (seed, stream,
// schedule).
class CoverStream {
public:
    CoverStream(const TorusLattice& lat, std::uint64_t seed, std::uint64_t burn_in_closures,
                std::uint64_t thin_closures, std::uint64_t stream = 0)
        : worm_(lat, seed, stream), burn_in_(burn_in_closures),
          thin_(std::max<std::uint64_t>(1, thin_closures))
    {
    }

    std::span<const Vertex> next()
    {
        if (!burned_) {
            worm_.advance_closures(burn_in_ > 0 ? burn_in_ : 1);
            burned_ = true;
        } else {
            worm_.advance_closures(thin_);
        }
        return worm_.partner();
    }

    const WormState& state() const { return worm_; }

private:
    WormState worm_;
    std::uint64_t burn_in_;
    std::uint64_t thin_;
    bool burned_ = false;
};

inline Matching sample_cover(const TorusLattice& lat, std::uint64_t seed,
                             std::uint64_t burn_in_closures, std::uint64_t thin_closures = 0)
{
    CoverStream stream(lat, seed, burn_in_closures,
                       thin_closures ? thin_closures : default_thin_closures(lat));
    auto p = stream.next();
    return Matching(lat, std::vector<Vertex>(p.begin(), p.end()));
}

struct ObservableStats {
    std::string name;
    double mean = 0.0;
    double std_error = 0.0;
    double tau_int = 0.5;
};

struct RunStats {
    std::uint64_t n_samples = 0;
    std::uint64_t burn_in_closures = 0;
    std::uint64_t thin_closures = 0;
    std::uint64_t seed = 0;
    int chains = 1;
    std::vector<ObservableStats> observables;

    const ObservableStats& observable(const std::string& name) const
    {
        for (const auto& o : observables)
            if (o.name == name) return o;
        throw std::invalid_argument("no observable named " + name);
    }
};

struct DoubleDimerSampleOptions {
    std::uint64_t burn_in_closures = 0; // 0 = default 100|V|
    std::uint64_t thin_closures = 0;    // 0 = default |V|
    int chains = 1;
    std::vector<int> connection_targets; // odd n: estimate P(o <-> n e1)
    // per-sample sink: (chain, sample, loop_len, target hits); used for CSV streaming
    std::function<void(int, std::uint64_t, int, std::span<const char>)> sink;
};

// One double-dimer sample = covers from two independently seeded chains, so
// d1 and d2 are independent by construction. Chains run in parallel; results
// merge in chain order with compensated sums.
inline RunStats sample_double_dimer_stats(const TorusLattice& lat, std::uint64_t n_samples,
                                          std::uint64_t seed,
                                          const DoubleDimerSampleOptions& opts = {})
{
    const Vertex V = lat.vertex_count();
    const Vertex e1 = lat.axis_point(1, 1);
    const std::uint64_t burn = opts.burn_in_closures ? opts.burn_in_closures
                                                     : default_burn_in_closures(lat);
    const std::uint64_t thin = opts.thin_closures ? opts.thin_closures : default_thin_closures(lat);
    const int chains = std::max(1, opts.chains);
    const std::size_t n_targets = opts.connection_targets.size();

    // per chain, per observable series: [0] loop density, [1] edge occupancy
    // of {o,e1} in d1, then one per connection target
    const std::size_t n_obs = 2 + n_targets;
    std::vector<std::vector<std::vector<double>>> series(
        chains, std::vector<std::vector<double>>(n_obs));
    std::vector<std::uint64_t> quota(chains, n_samples / chains);
    for (std::uint64_t i = 0; i < n_samples % chains; ++i) ++quota[i];

    std::vector<Vertex> target_vertices;
    for (int n : opts.connection_targets) target_vertices.push_back(lat.axis_point(n, 1));

    auto run_chain = [&](int c) {
        CoverStream a(lat, seed, burn, thin, 2 * static_cast<std::uint64_t>(c));
        CoverStream b(lat, seed, burn, thin, 2 * static_cast<std::uint64_t>(c) + 1);
        std::vector<char> hits(n_targets);
        for (auto& s : series[c]) s.reserve(quota[c]);
        for (std::uint64_t i = 0; i < quota[c]; ++i) {
            auto p1 = a.next();
            auto p2 = b.next();
            std::fill(hits.begin(), hits.end(), 0);
            int len = 0;
            loop_detail::trace_loop(p1, p2, 0, [&](Vertex u) {
                ++len;
                for (std::size_t t = 0; t < n_targets; ++t)
                    if (u == target_vertices[t]) hits[t] = 1;
            });
            series[c][0].push_back(static_cast<double>(len) / static_cast<double>(V));
            series[c][1].push_back(p1[0] == e1 ? 1.0 : 0.0);
            for (std::size_t t = 0; t < n_targets; ++t)
                series[c][2 + t].push_back(hits[t]);
            if (opts.sink) opts.sink(c, i, len, hits);
        }
    };

    if (chains == 1) {
        run_chain(0);
    } else {
        std::vector<std::thread> pool;
        for (int c = 0; c < chains; ++c) pool.emplace_back(run_chain, c);
        for (auto& th : pool) th.join();
    }

    RunStats rs;
    rs.n_samples = n_samples;
    rs.burn_in_closures = burn;
    rs.thin_closures = thin;
    rs.seed = seed;
    rs.chains = chains;
    std::vector<std::string> names{"loop_density", "edge_occupancy"};
    for (int t : opts.connection_targets) names.push_back("conn_" + std::to_string(t) + "e1");

    for (std::size_t ob = 0; ob < n_obs; ++ob) {
        ObservableStats o;
        o.name = names[ob];
        if (chains == 1) {
            auto st = analyze_series(series[0][ob]);
            o.mean = st.mean;
            o.std_error = st.std_error;
            o.tau_int = st.tau_int;
        } else {
            // pooled mean (count-weighted), conservative pooled error
            double weighted = 0.0, var_acc = 0.0, tau_max = 0.5;
            for (int c = 0; c < chains; ++c) {
                auto st = analyze_series(series[c][ob]);
                double wc = static_cast<double>(quota[c]) / static_cast<double>(n_samples);
                weighted += wc * st.mean;
                var_acc += wc * wc * st.std_error * st.std_error;
                tau_max = std::max(tau_max, st.tau_int);
            }
            o.mean = weighted;
            o.std_error = std::sqrt(var_acc);
            o.tau_int = tau_max;
        }
        rs.observables.push_back(o);
    }
    return rs;
}

} // namespace dimerloops
