#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace foldcert {

// Dense integer matrix, row-major.
struct IntMat {
    int rows = 0;
    int cols = 0;
    std::vector<long long> a;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}

    long long& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    long long at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

// Product check entry point for the dd=0 invariant.
bool is_zero_product(const IntMat& A, const IntMat& B);

struct SmithResult {
    int rank = 0;
    // Nonzero diagonal entries d1 | d2 | ... (positive), as decimal strings so
    // arbitrary-precision results survive the fast/exact split.
    std::vector<std::string> divisors;

    std::vector<long long> divisors_ll() const;
};

// Smith normal form over Z. Runs a minimal-pivot elimination in checked
// int64 arithmetic and transparently redoes the computation with
// arbitrary-precision integers if any intermediate would overflow.
SmithResult smith_normal_form(const IntMat& A);

}  // namespace foldcert
