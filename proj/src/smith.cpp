#include "foldcert/smith.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace foldcert {

using boost::multiprecision::cpp_int;

namespace {

struct Int64Overflow {};

// Checked int64 wrapper so the fast path can bail out to cpp_int.
struct CheckedI64 {
    long long v = 0;
    CheckedI64() = default;
    CheckedI64(long long x) : v(x) {}

    friend CheckedI64 operator*(CheckedI64 a, CheckedI64 b) {
        long long r;
        if (__builtin_mul_overflow(a.v, b.v, &r)) throw Int64Overflow{};
        return r;
    }
    friend CheckedI64 operator-(CheckedI64 a, CheckedI64 b) {
        long long r;
        if (__builtin_sub_overflow(a.v, b.v, &r)) throw Int64Overflow{};
        return r;
    }
    friend CheckedI64 operator+(CheckedI64 a, CheckedI64 b) {
        long long r;
        if (__builtin_add_overflow(a.v, b.v, &r)) throw Int64Overflow{};
        return r;
    }
    friend CheckedI64 operator/(CheckedI64 a, CheckedI64 b) { return a.v / b.v; }
    friend CheckedI64 operator%(CheckedI64 a, CheckedI64 b) { return a.v % b.v; }
    friend bool operator==(CheckedI64 a, long long b) { return a.v == b; }
    friend bool operator!=(CheckedI64 a, long long b) { return a.v != b; }
    friend bool operator<(CheckedI64 a, CheckedI64 b) { return a.v < b.v; }
};

template <class T>
T abs_val(T x) {
    return x < T(0) ? T(0) - x : x;
}
long long abs_val(CheckedI64 x) { return std::llabs(x.v); }

template <class T>
bool is_zero(const T& x) {
    return x == 0;
}

template <class T>
std::string to_string_val(const T& x);
template <>
std::string to_string_val(const cpp_int& x) {
    return x.str();
}
template <>
std::string to_string_val(const CheckedI64& x) {
    return std::to_string(x.v);
}

// Classic Smith reduction with minimal-absolute-value pivoting; keeps
// intermediate entries small on boundary matrices with entries in {-1,0,1}.
template <class T>
SmithResult smith_impl(const IntMat& A) {
    int m = A.rows, n = A.cols;
    std::vector<std::vector<T>> M(m, std::vector<T>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) M[i][j] = T(A.at(i, j));

    std::vector<T> diag;
    int t = 0;
    while (t < m && t < n) {
        // minimal nonzero pivot in the trailing submatrix
        int pi = -1, pj = -1;
        for (int i = t; i < m; ++i)
            for (int j = t; j < n; ++j)
                if (!is_zero(M[i][j]) &&
                    (pi < 0 || abs_val(M[i][j]) < abs_val(M[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        std::swap(M[t], M[pi]);
        for (int i = 0; i < m; ++i) std::swap(M[i][t], M[i][pj]);

        bool again = true;
        while (again) {
            again = false;
            // clear column t by Euclidean steps
            for (int i = t + 1; i < m; ++i) {
                if (is_zero(M[i][t])) continue;
                T q = M[i][t] / M[t][t];
                if (!is_zero(q))
                    for (int j = t; j < n; ++j) M[i][j] = M[i][j] - q * M[t][j];
                if (!is_zero(M[i][t])) {
                    std::swap(M[t], M[i]);
                    again = true;
                }
            }
            // clear row t
            for (int j = t + 1; j < n; ++j) {
                if (is_zero(M[t][j])) continue;
                T q = M[t][j] / M[t][t];
                if (!is_zero(q))
                    for (int i = t; i < m; ++i) M[i][j] = M[i][j] - q * M[i][t];
                if (!is_zero(M[t][j])) {
                    for (int i = 0; i < m; ++i) std::swap(M[i][t], M[i][j]);
                    again = true;
                }
            }
        }

        // divisibility: fold any non-multiple into column t and repeat
        bool divisible = true;
        for (int i = t + 1; i < m && divisible; ++i)
            for (int j = t + 1; j < n && divisible; ++j)
                if (!is_zero(M[i][j] % M[t][t])) {
                    for (int jj = t; jj < n; ++jj) M[t][jj] = M[t][jj] + M[i][jj];
                    divisible = false;
                }
        if (!divisible) continue;

        diag.push_back(M[t][t]);
        ++t;
    }

    SmithResult res;
    res.rank = static_cast<int>(diag.size());
    for (auto& d : diag) {
        T v = d;
        if (v < T(0)) v = T(0) - v;
        res.divisors.push_back(to_string_val(v));
    }
    return res;
}

}  // namespace

std::vector<long long> SmithResult::divisors_ll() const {
    std::vector<long long> out;
    out.reserve(divisors.size());
    for (const auto& s : divisors) out.push_back(std::stoll(s));
    return out;
}

SmithResult smith_normal_form(const IntMat& A) {
    try {
        return smith_impl<CheckedI64>(A);
    } catch (const Int64Overflow&) {
        return smith_impl<cpp_int>(A);
    }
}

bool is_zero_product(const IntMat& A, const IntMat& B) {
    if (A.cols != B.rows) return false;
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            cpp_int s = 0;
            for (int k = 0; k < A.cols; ++k)
                s += cpp_int(A.at(i, k)) * B.at(k, j);
            if (s != 0) return false;
        }
    return true;
}


}  // namespace foldcert
