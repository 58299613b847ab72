#pragma once

#include <bit>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "foldcert/errors.hpp"

namespace foldcert {

// Elementary cube in Z^d: product of intervals [base_i, base_i + e_i] with
// e_i in {0,1} encoded as bits of `extent`. dim = popcount(extent).
struct Cube {
    std::vector<int32_t> base;
    uint32_t extent = 0;

    int ambient_dim() const { return static_cast<int>(base.size()); }
    int dim() const { return std::popcount(extent); }
    bool spans(int axis) const { return (extent >> axis) & 1u; }

    friend bool operator==(const Cube& a, const Cube& b) {
        return a.extent == b.extent && a.base == b.base;
    }
    // Lexicographic on (dimension, base coordinates, extent): fixes the cell
    // ordering used for all chain-complex bases.
    friend bool operator<(const Cube& a, const Cube& b) {
        if (a.dim() != b.dim()) return a.dim() < b.dim();
        if (a.base != b.base) return a.base < b.base;
        return a.extent < b.extent;
    }
};

// Signed faces of the cubical boundary; pairs (face, coefficient).
std::vector<std::pair<Cube, int>> cube_boundary(const Cube& c);

// All faces of all dimensions, the cube included.
std::vector<Cube> cube_closure(const Cube& c);

struct CubicalSet {
    int ambient_dim = 0;
    std::set<Cube> cells;

    CubicalSet() = default;
    explicit CubicalSet(int dim) : ambient_dim(dim) {}

    bool empty() const { return cells.empty(); }
    bool contains(const Cube& c) const { return cells.count(c) > 0; }

    // Insert a cube together with its full closure.
    void insert_closed(const Cube& c);

    bool closed() const;
    bool subset_of(const CubicalSet& other) const;

    std::vector<Cube> cells_of_dim(int k) const;
    int max_dim() const;
};

}  // namespace foldcert
