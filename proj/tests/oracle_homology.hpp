#pragma once

// Independent reduction oracle for homology tests: betti numbers via plain
// rational Gaussian elimination, torsion via a textbook Smith reduction that
// always takes the first nonzero pivot.  Deliberately kept separate from the
// library's reduction path.

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "foldcert/homology.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline int rank_over_Q(const foldcert::IntMat& A) {
    int m = A.rows, n = A.cols;
    std::vector<std::vector<cpp_rational>> M(m, std::vector<cpp_rational>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) M[i][j] = A.at(i, j);
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int piv = -1;
        for (int i = rank; i < m; ++i)
            if (M[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(M[rank], M[piv]);
        cpp_rational p = M[rank][col];
        for (int j = col; j < n; ++j) M[rank][j] /= p;
        for (int i = 0; i < m; ++i) {
            if (i == rank || M[i][col] == 0) continue;
            cpp_rational f = M[i][col];
            for (int j = col; j < n; ++j) M[i][j] -= f * M[rank][j];
        }
        ++rank;
    }
    return rank;
}

inline std::vector<cpp_int> smith_divisors(const foldcert::IntMat& A) {
    int m = A.rows, n = A.cols;
    std::vector<std::vector<cpp_int>> M(m, std::vector<cpp_int>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) M[i][j] = A.at(i, j);
    std::vector<cpp_int> out;
    int t = 0;
    while (t < m && t < n) {
        int pi = -1, pj = -1;
        for (int i = t; i < m && pi < 0; ++i)
            for (int j = t; j < n; ++j)
                if (M[i][j] != 0) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi < 0) break;
        std::swap(M[t], M[pi]);
        for (int i = 0; i < m; ++i) std::swap(M[i][t], M[i][pj]);
        bool done = false;
        while (!done) {
            done = true;
            for (int i = t + 1; i < m; ++i)
                while (M[i][t] != 0) {
                    cpp_int q = M[i][t] / M[t][t];
                    for (int j = t; j < n; ++j) M[i][j] -= q * M[t][j];
                    if (M[i][t] != 0) {
                        std::swap(M[t], M[i]);
                        done = false;
                    }
                }
            for (int j = t + 1; j < n; ++j)
                while (M[t][j] != 0) {
                    cpp_int q = M[t][j] / M[t][t];
                    for (int i = t; i < m; ++i) M[i][j] -= q * M[i][t];
                    if (M[t][j] != 0) {
                        for (int i = 0; i < m; ++i) std::swap(M[i][t], M[i][j]);
                        done = false;
                    }
                }
            if (done) {
                for (int i = t + 1; i < m && done; ++i)
                    for (int j = t + 1; j < n && done; ++j)
                        if (M[i][j] % M[t][t] != 0) {
                            for (int jj = t; jj < n; ++jj) M[t][jj] += M[i][jj];
                            done = false;
                        }
            }
        }
        cpp_int d = M[t][t];
        if (d < 0) d = -d;
        out.push_back(d);
        ++t;
    }
    return out;
}

inline foldcert::HomologyResult homology(const foldcert::ChainComplex& cc) {
    foldcert::HomologyResult h;
    int top = cc.ambient_dim;
    h.betti.assign(top + 1, 0);
    h.torsion.assign(top + 1, {});
    std::vector<int> rank(top + 2, 0);
    std::vector<std::vector<cpp_int>> divs(top + 2);
    for (int k = 0; k <= top; ++k) {
        rank[k] = rank_over_Q(cc.boundary[k]);
        divs[k] = smith_divisors(cc.boundary[k]);
    }
    for (int k = 0; k <= top; ++k) {
        int rk1 = k + 1 <= top ? rank[k + 1] : 0;
        h.betti[k] = cc.cells_in_degree(k) - rank[k] - rk1;
        if (k + 1 <= top)
            for (const auto& d : divs[k + 1])
                if (d > 1) h.torsion[k].push_back(d.convert_to<long long>());
    }
    return h;
}

inline foldcert::HomologyResult relative_homology(const foldcert::CubicalSet& N,
                                                  const foldcert::CubicalSet& L) {
    return homology(foldcert::relative_chain_complex(N, L));
}

}  // namespace oracle
