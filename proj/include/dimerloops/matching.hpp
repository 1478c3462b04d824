#pragma once

#include "dimerloops/torus_lattice.hpp"

#include <algorithm>
#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

namespace dimerloops {

inline constexpr Vertex kExcluded = -1;

// A dimer cover of the torus minus an excluded vertex set, stored as a
// partner map. partner[v] == kExcluded marks v as excluded.
struct Matching {
    const TorusLattice* lattice = nullptr;
    std::vector<Vertex> partner;

    Matching() = default;
    Matching(const TorusLattice& lat, std::vector<Vertex> p) : lattice(&lat), partner(std::move(p))
    {
        if (static_cast<Vertex>(partner.size()) != lat.vertex_count())
            throw std::invalid_argument("partner map size mismatch");
    }

    Vertex operator[](Vertex v) const { return partner[v]; }
    bool excluded(Vertex v) const { return partner[v] == kExcluded; }
    bool covers(Vertex v) const { return partner[v] >= 0; }
    bool contains_dimer(Vertex a, Vertex b) const { return partner[a] == b; }

    std::vector<Vertex> excluded_set() const
    {
        std::vector<Vertex> out;
        for (Vertex v = 0; v < static_cast<Vertex>(partner.size()); ++v)
            if (excluded(v)) out.push_back(v);
        return out;
    }

    int dimer_count() const
    {
        int covered = 0;
        for (Vertex p : partner)
            if (p >= 0) ++covered;
        return covered / 2;
    }

    // Checks the full invariant set: fixed-point-free involution on V \ A,
    // partners adjacent, excluded marks consistent.
    void validate() const
    {
        if (!lattice) throw std::invalid_argument("matching without lattice");
        const Vertex n = lattice->vertex_count();
        for (Vertex v = 0; v < n; ++v) {
            Vertex p = partner[v];
            if (p == kExcluded) continue;
            if (p < 0 || p >= n) throw std::invalid_argument("partner out of range");
            if (p == v) throw std::invalid_argument("self-partnered vertex");
            if (partner[p] != v) throw std::invalid_argument("partner map is not an involution");
            if (!lattice->adjacent(v, p)) throw std::invalid_argument("partners not adjacent");
        }
    }
};

// Flat storage for large cover collections (one partner map per row).
class CoverList {
public:
    explicit CoverList(Vertex width) : width_(width) {}

    std::size_t size() const { return data_.size() / width_; }
    Vertex width() const { return width_; }

    std::span<const Vertex> operator[](std::size_t i) const
    {
        return {data_.data() + i * width_, static_cast<std::size_t>(width_)};
    }

    void push(std::span<const Vertex> partner)
    {
        data_.insert(data_.end(), partner.begin(), partner.end());
    }

    Matching matching(const TorusLattice& lat, std::size_t i) const
    {
        auto row = (*this)[i];
        return Matching(lat, std::vector<Vertex>(row.begin(), row.end()));
    }

private:
    Vertex width_;
    std::vector<Vertex> data_;
};

} // namespace dimerloops
