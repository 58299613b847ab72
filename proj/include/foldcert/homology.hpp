#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foldcert/cubical.hpp"
#include "foldcert/smith.hpp"

namespace foldcert {

// Chain complex of a cubical pair (N, L): bases are the cells of N \ L,
// boundary maps drop faces that lie in L.
struct ChainComplex {
    int ambient_dim = 0;
    std::vector<std::vector<Cube>> basis;  // degree -> ordered cells
    std::vector<IntMat> boundary;          // boundary[k] : C_k -> C_{k-1}

    int cells_in_degree(int k) const {
        if (k < 0 || k >= static_cast<int>(basis.size())) return 0;
        return static_cast<int>(basis[k].size());
    }
    long long euler_characteristic() const;
    bool boundary_squares_to_zero() const;
};

// Integer homology, reported per degree 0..ambient_dim.
struct HomologyResult {
    std::vector<int> betti;
    std::vector<std::vector<long long>> torsion;  // orders > 1 per degree

    bool trivial() const;
    // Exactly one Z in `degree`, zero elsewhere, no torsion anywhere.
    bool is_z_in_single_degree(int degree) const;
    std::string summary() const;

    friend bool operator==(const HomologyResult& a, const HomologyResult& b) {
        return a.betti == b.betti && a.torsion == b.torsion;
    }
};

// Boundary matrix of degree k in the set's own (lexicographic) cell order.
IntMat boundary_matrix(const CubicalSet& cs, int degree);

ChainComplex relative_chain_complex(const CubicalSet& N, const CubicalSet& L);

// Same complex but with the given relative-cell order (used to check that
// homology does not depend on the basis permutation).
ChainComplex relative_chain_complex_ordered(const CubicalSet& N, const CubicalSet& L,
                                            const std::vector<Cube>& order);

HomologyResult homology_of(const ChainComplex& cc);

// H_*(N, L; Z).  L may be empty; throws NotASubcomplex if L is not a closed
// subcomplex of N.
HomologyResult relative_homology(const CubicalSet& N, const CubicalSet& L);

}  // namespace foldcert
