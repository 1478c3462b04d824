#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimerloops {

using Vertex = std::int32_t;
inline constexpr Vertex kNoVertex = -1;

enum class Parity { even, odd };

// The d-dimensional discrete torus with even side lengths. Vertex indexing is
// row-major with axis 1 fastest, so index 0 is the origin and index 1 is e_1.
// Immutable after construction; safe for concurrent reads.
class TorusLattice {
public:
    TorusLattice(int d, std::vector<int> sides) : dim_(d), sides_(std::move(sides))
    {
        if (dim_ < 1) throw std::invalid_argument("dimension must be >= 1");
        if (static_cast<int>(sides_.size()) != dim_)
            throw std::invalid_argument("need one side length per axis");
        for (int s : sides_) {
            if (s < 2) throw std::invalid_argument("side lengths must be >= 2");
            if (s % 2 != 0)
                throw std::invalid_argument(
                    "odd side length " + std::to_string(s) +
                    " rejected: the torus must stay bipartite (L even)");
        }
        long long n = 1;
        for (int s : sides_) {
            n *= s;
            if (n > (1LL << 30)) throw std::invalid_argument("lattice too large");
        }
        vertex_count_ = static_cast<Vertex>(n);
        degenerate_ = std::any_of(sides_.begin(), sides_.end(), [](int s) { return s == 2; });
        build_neighbors();
    }

    static TorusLattice cubic(int d, int L) { return TorusLattice(d, std::vector<int>(d, L)); }

    int dim() const { return dim_; }
    const std::vector<int>& sides() const { return sides_; }
    Vertex vertex_count() const { return vertex_count_; }
    // Side length 2 collapses +e_i and -e_i onto one neighbor. We keep the
    // simple graph and tag the lattice degenerate; theorem-grade commands and
    // the sampler refuse such lattices (their formulas presume 2d incident edges).
    bool degenerate() const { return degenerate_; }
    int full_degree() const { return 2 * dim_; }

    std::span<const Vertex> neighbors(Vertex v) const
    {
        return {neighbor_data_.data() + offsets_[v],
                static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
    }

    std::vector<int> coords(Vertex v) const
    {
        std::vector<int> c(dim_);
        for (int i = 0; i < dim_; ++i) {
            c[i] = static_cast<int>(v % sides_[i]);
            v /= sides_[i];
        }
        return c;
    }

    Vertex vertex_at(std::span<const int> coord) const
    {
        if (static_cast<int>(coord.size()) != dim_)
            throw std::invalid_argument("coordinate arity mismatch");
        Vertex v = 0;
        for (int i = dim_ - 1; i >= 0; --i) {
            int c = coord[i] % sides_[i];
            if (c < 0) c += sides_[i];
            v = v * sides_[i] + c;
        }
        return v;
    }

    // Single-axis step; dir is +1 or -1.
    Vertex step(Vertex v, int axis, int dir) const
    {
        int stride = strides_[axis];
        int c = (v / stride) % sides_[axis];
        int nc = c + dir;
        if (nc < 0) nc += sides_[axis];
        if (nc >= sides_[axis]) nc -= sides_[axis];
        return v + (nc - c) * stride;
    }

    // The vertex n*e_i (axes numbered from 1 as in coordinates x_1..x_d).
    Vertex axis_point(long long n, int axis1based = 1) const
    {
        if (axis1based < 1 || axis1based > dim_) throw std::invalid_argument("axis out of range");
        int L = sides_[axis1based - 1];
        int c = static_cast<int>(((n % L) + L) % L);
        return static_cast<Vertex>(c) * strides_[axis1based - 1];
    }

    bool even_vertex(Vertex v) const
    {
        int s = 0;
        for (int i = 0; i < dim_; ++i) {
            s += static_cast<int>(v % sides_[i]);
            v /= sides_[i];
        }
        return s % 2 == 0;
    }

    std::vector<Vertex> sublattice(Parity p) const
    {
        std::vector<Vertex> out;
        out.reserve(vertex_count_ / 2);
        for (Vertex v = 0; v < vertex_count_; ++v)
            if (even_vertex(v) == (p == Parity::even)) out.push_back(v);
        return out;
    }

    Vertex translate(Vertex v, Vertex by) const
    {
        auto a = coords(v), b = coords(by);
        for (int i = 0; i < dim_; ++i) a[i] = (a[i] + b[i]) % sides_[i];
        return vertex_at(a);
    }

    Vertex negate(Vertex v) const
    {
        auto a = coords(v);
        for (int i = 0; i < dim_; ++i) a[i] = (sides_[i] - a[i]) % sides_[i];
        return vertex_at(a);
    }

    // l1 distance on the torus; equals graph distance.
    int l1_distance(Vertex a, Vertex b) const
    {
        auto ca = coords(a), cb = coords(b);
        int d = 0;
        for (int i = 0; i < dim_; ++i) {
            int diff = std::abs(ca[i] - cb[i]);
            d += std::min(diff, sides_[i] - diff);
        }
        return d;
    }

    bool adjacent(Vertex a, Vertex b) const
    {
        auto ns = neighbors(a);
        return std::find(ns.begin(), ns.end(), b) != ns.end();
    }

    // All edges as normalized (min,max) pairs, lexicographically sorted.
    std::vector<std::pair<Vertex, Vertex>> edges() const
    {
        std::vector<std::pair<Vertex, Vertex>> es;
        for (Vertex v = 0; v < vertex_count_; ++v)
            for (Vertex w : neighbors(v))
                if (v < w) es.emplace_back(v, w);
        return es;
    }

    bool same_shape(const TorusLattice& other) const
    {
        return dim_ == other.dim_ && sides_ == other.sides_;
    }

private:
    void build_neighbors()
    {
        strides_.assign(dim_, 1);
        for (int i = 1; i < dim_; ++i) strides_[i] = strides_[i - 1] * sides_[i - 1];
        offsets_.assign(vertex_count_ + 1, 0);
        neighbor_data_.reserve(static_cast<std::size_t>(vertex_count_) * 2 * dim_);
        for (Vertex v = 0; v < vertex_count_; ++v) {
            std::set<Vertex> ns;
            for (int i = 0; i < dim_; ++i) {
                ns.insert(step(v, i, +1));
                ns.insert(step(v, i, -1));
            }
            offsets_[v + 1] = offsets_[v] + static_cast<int>(ns.size());
            for (Vertex w : ns) neighbor_data_.push_back(w);
        }
    }

    int dim_;
    std::vector<int> sides_;
    std::vector<int> strides_;
    Vertex vertex_count_ = 0;
    bool degenerate_ = false;
    std::vector<int> offsets_;
    std::vector<Vertex> neighbor_data_;
};

} // namespace dimerloops
