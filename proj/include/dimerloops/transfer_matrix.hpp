#pragma once

#include "dimerloops/enumerate.hpp"
#include "dimerloops/errors.hpp"
#include "dimerloops/matching.hpp"
#include "dimerloops/rational.hpp"
#include "dimerloops/torus_lattice.hpp"

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dimerloops {

struct TransferOptions {
    std::size_t max_states = std::size_t{1} << 24; // interface-state width guard
    int threads = 0;                               // 0 = hardware concurrency
};

namespace tm_detail {

// Geometry of the contraction: slabs along the largest axis, cross-section
// positions in row-major order over the remaining axes.
struct Contraction {
    int axis = 0;
    int n_slabs = 0;
    int width = 0;
    std::vector<std::vector<int>> upper_nbrs; // intra-slab neighbors q > p
    std::vector<std::uint32_t> excl;          // per-slab excluded-position masks

    Contraction(const TorusLattice& lat, std::span<const Vertex> excluded)
    {
        const auto& sides = lat.sides();
        axis = static_cast<int>(std::max_element(sides.begin(), sides.end()) - sides.begin());
        n_slabs = sides[axis];
        width = lat.vertex_count() / n_slabs;

        // position <-> transverse coordinates
        taxes_.clear();
        for (int i = 0; i < lat.dim(); ++i)
            if (i != axis) taxes_.push_back(i);
        lat_ = &lat;

        upper_nbrs.assign(width, {});
        for (int p = 0; p < width; ++p) {
            Vertex v = vertex(0, p);
            for (Vertex w : lat.neighbors(v)) {
                int t = slab_of(w);
                if (t != 0) continue;
                int q = position_of(w);
                if (q > p) upper_nbrs[p].push_back(q);
            }
        }

        excl.assign(n_slabs, 0);
        for (Vertex v : excluded) excl[slab_of(v)] |= std::uint32_t{1} << position_of(v);
    }

    Vertex vertex(int t, int p) const
    {
        std::vector<int> c(lat_->dim(), 0);
        c[axis] = t;
        for (std::size_t j = 0; j < taxes_.size(); ++j) {
            c[taxes_[j]] = p % lat_->sides()[taxes_[j]];
            p /= lat_->sides()[taxes_[j]];
        }
        return lat_->vertex_at(c);
    }

    int slab_of(Vertex v) const { return lat_->coords(v)[axis]; }

    int position_of(Vertex v) const
    {
        auto c = lat_->coords(v);
        int p = 0;
        for (std::size_t j = taxes_.size(); j-- > 0;) p = p * lat_->sides()[taxes_[j]] + c[taxes_[j]];
        return p;
    }

private:
    const TorusLattice* lat_ = nullptr;
    std::vector<int> taxes_;
};

struct uint64_overflow : std::overflow_error {
    uint64_overflow() : std::overflow_error("transfer-matrix count exceeds 64 bits") {}
};

template <class Value>
inline void add_to(Value& dst, const Value& v)
{
    dst += v;
}

template <>
inline void add_to<std::uint64_t>(std::uint64_t& dst, const std::uint64_t& v)
{
    if (__builtin_add_overflow(dst, v, &dst)) throw uint64_overflow();
}

// Sums, over seam masks in [b_lo, b_hi), the number of cover completions whose
// seam-crossing dimer pattern is exactly the mask. State bits: below the cursor
// "forward dimer chosen", at/above it "already covered".
template <class Value>
Value seam_range_sum(const Contraction& g, std::uint32_t b_lo, std::uint32_t b_hi)
{
    const std::size_t n_states = std::size_t{1} << g.width;
    const std::uint32_t seam_skip = g.excl[0] | g.excl[g.n_slabs - 1];
    std::vector<Value> cur(n_states), nxt(n_states);
    Value total = 0;

    for (std::uint32_t b = b_lo; b < b_hi; ++b) {
        if (b & seam_skip) continue;
        std::fill(cur.begin(), cur.end(), Value(0));
        cur[b] = 1;
        for (int t = 0; t < g.n_slabs; ++t) {
            const std::uint32_t et = g.excl[t];
            const std::uint32_t en = g.excl[(t + 1) % g.n_slabs];
            for (int p = 0; p < g.width; ++p) {
                std::fill(nxt.begin(), nxt.end(), Value(0));
                const std::uint32_t bit = std::uint32_t{1} << p;
                for (std::size_t s = 0; s < n_states; ++s) {
                    const Value& v = cur[s];
                    if (v == 0) continue;
                    if (et & bit) {
                        if (!(s & bit)) add_to(nxt[s], v);
                    } else if (s & bit) {
                        add_to(nxt[s ^ bit], v);
                    } else {
                        if (!(en & bit)) add_to(nxt[s | bit], v); // forward dimer
                        for (int q : g.upper_nbrs[p]) {
                            const std::uint32_t qb = std::uint32_t{1} << q;
                            if (!(s & qb) && !(et & qb)) add_to(nxt[s | qb], v); // intra dimer
                        }
                    }
                }
                cur.swap(nxt);
            }
        }
        add_to(total, cur[b]);
    }
    return total;
}

template <class Value>
BigInt count_transfer(const Contraction& g, int threads)
{
    const std::uint32_t n_seams = std::uint32_t{1} << g.width;
    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::max(1, std::min<int>(nt, 64));
    if (nt == 1 || n_seams < 64) return BigInt(seam_range_sum<Value>(g, 0, n_seams));

    std::vector<Value> partials(nt, Value(0));
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int k = 0; k < nt; ++k) {
        pool.emplace_back([&, k] {
            try {
                std::uint32_t lo = static_cast<std::uint32_t>(std::uint64_t(n_seams) * k / nt);
                std::uint32_t hi = static_cast<std::uint32_t>(std::uint64_t(n_seams) * (k + 1) / nt);
                partials[k] = seam_range_sum<Value>(g, lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    BigInt total = 0;
    for (const Value& p : partials) total += p;
    return total;
}

} // namespace tm_detail

// Exact |D(A)| by transfer-matrix contraction along the largest axis, with the
// seam handled by summing over boundary-crossing patterns. Excluded vertices
// are forced to carry no incident dimer at their slab.
inline BigInt count_covers_transfer_matrix(const TorusLattice& lat,
                                           std::span<const Vertex> excluded,
                                           const TransferOptions& opts = {})
{
    detail::excluded_template(lat, excluded); // validates range/duplicates
    if ((lat.vertex_count() - static_cast<int>(excluded.size())) % 2 != 0) return 0;

    int max_side = *std::max_element(lat.sides().begin(), lat.sides().end());
    if (max_side == 2) {
        // every axis collapsed: the lattice is tiny, enumerate directly
        EnumerationBudget b;
        b.max_vertices = 36;
        return count_covers_enumeration(lat, excluded, b);
    }

    tm_detail::Contraction g(lat, excluded);
    if (g.width >= 32 || (std::size_t{1} << g.width) > opts.max_states)
        throw budget_exceeded("transfer-matrix interface of 2^" + std::to_string(g.width) +
                              " states exceeds the configured state budget");

    try {
        return tm_detail::count_transfer<std::uint64_t>(g, opts.threads);
    } catch (const tm_detail::uint64_overflow&) {
        return tm_detail::count_transfer<BigInt>(g, opts.threads);
    }
}

// |D(A)| -- the exact-counting front door used throughout.
inline BigInt count_covers(const TorusLattice& lat, std::span<const Vertex> excluded,
                           const TransferOptions& opts = {})
{
    return count_covers_transfer_matrix(lat, excluded, opts);
}

// Probability that a uniform cover puts a dimer on the given edge; equals
// 1/(2d) by vertex-transitivity, which the exact ratio must reproduce.
inline Rational edge_probability(const TorusLattice& lat, Vertex a, Vertex b,
                                 const TransferOptions& opts = {})
{
    if (lat.degenerate())
        throw std::invalid_argument("edge probability on a degenerate lattice (side 2) rejected");
    if (!lat.adjacent(a, b)) throw std::invalid_argument("not a lattice edge");
    std::vector<Vertex> ab{a, b};
    BigInt with = count_covers(lat, ab, opts);
    BigInt all = count_covers(lat, {}, opts);
    return Rational(with, all);
}

} // namespace dimerloops
