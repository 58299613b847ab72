#pragma once

#include <optional>
#include <string>

#include "foldcert/block.hpp"

namespace foldcert {

// Homology Conley indices of the full invariant set and of the
// attractor/repeller pair, with the extracted unstable dimension.
struct ConleyIndexReport {
    HomologyResult ch_S;      // via (B0, exit B0)
    HomologyResult ch_A;      // via (B_A, exit B_A)
    HomologyResult ch_Astar;  // via (B_A*, exit B_A*)
    std::optional<int> k;
};

// The unique k >= 1 with ch_A = Z in degree k-1 only and ch_Astar = Z in
// degree k only, both torsion-free; nullopt otherwise.
std::optional<int> extract_unstable_dimension(const HomologyResult& ch_A,
                                              const HomologyResult& ch_Astar);

ConleyIndexReport conley_index_report(const BlockPair& pair);

struct Certificate {
    bool granted = false;
    int k = 0;
    std::string rejection_reason;  // names the first failed condition
    // condition ledger, in definition order
    bool product_block_assumed = true;  // (i): holds by construction
    bool simple_block_ok = false;       // (ii)
    bool ch_S_trivial = false;          // (iii)
    bool pair_indices_ok = false;       // (iv)
};

// Assemble the homological saddle-node certificate: ch_S identically zero,
// the simple-block validation passed, and k present.  Rejection names the
// first failed condition in (i)-(iv) order.
Certificate certify_homological_saddle_node(const ConleyIndexReport& report,
                                            const BlockPair& blocks,
                                            const SimpleBlockReport& simple);

}  // namespace foldcert
