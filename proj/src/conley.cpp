#include "foldcert/conley.hpp"

namespace foldcert {

std::optional<int> extract_unstable_dimension(const HomologyResult& ch_A,
                                              const HomologyResult& ch_Astar) {
    int top = static_cast<int>(ch_Astar.betti.size());
    for (int k = 1; k < top + 1; ++k) {
        if (ch_A.is_z_in_single_degree(k - 1) && ch_Astar.is_z_in_single_degree(k))
            return k;
    }
    return std::nullopt;
}

ConleyIndexReport conley_index_report(const BlockPair& pair) {
    ConleyIndexReport rep;
    rep.ch_S = conley_index_of_block(pair.parent);
    rep.ch_A = conley_index_of_block(pair.attractor);
    rep.ch_Astar = conley_index_of_block(pair.repeller);
    rep.k = extract_unstable_dimension(rep.ch_A, rep.ch_Astar);
    return rep;
}

Certificate certify_homological_saddle_node(const ConleyIndexReport& report,
                                            const BlockPair& blocks,
                                            const SimpleBlockReport& simple) {
    (void)blocks;  // product structure is carried by construction
    Certificate cert;
    cert.product_block_assumed = true;
    cert.simple_block_ok = simple.pass;
    cert.ch_S_trivial = report.ch_S.trivial();
    cert.pair_indices_ok = report.k.has_value();

    if (!cert.simple_block_ok) {
        cert.rejection_reason = "condition ii: simple-block validation failed";
        return cert;
    }
    if (!cert.ch_S_trivial) {
        cert.rejection_reason = "condition iii: CH_*(S) is not zero (" +
                                report.ch_S.summary() + ")";
        return cert;
    }
    if (!cert.pair_indices_ok) {
        cert.rejection_reason =
            "condition iv: no unstable dimension k matches CH_*(A), CH_*(A*)";
        return cert;
    }
    cert.granted = true;
    cert.k = *report.k;
    return cert;
}

}  // namespace foldcert
