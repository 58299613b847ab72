#include "foldcert/cubical.hpp"

namespace foldcert {

// Product rule: d(I x P) = dI x P + (-1)^{dim I} I x dP, with
// d[k, k+1] = [k+1] - [k].  Walking the axes left to right, the j-th
// nondegenerate interval contributes with sign (-1)^{j-1}.
std::vector<std::pair<Cube, int>> cube_boundary(const Cube& c) {
    std::vector<std::pair<Cube, int>> out;
    int sign = 1;
    for (int axis = 0; axis < c.ambient_dim(); ++axis) {
        if (!c.spans(axis)) continue;
        Cube upper = c;
        upper.extent &= ~(1u << axis);
        upper.base[axis] += 1;
        Cube lower = c;
        lower.extent &= ~(1u << axis);
        out.emplace_back(std::move(upper), sign);
        out.emplace_back(std::move(lower), -sign);
        sign = -sign;
    }
    return out;
}

std::vector<Cube> cube_closure(const Cube& c) {
    std::set<Cube> seen;
    std::vector<Cube> stack{c};
    while (!stack.empty()) {
        Cube cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second) continue;
        for (auto& [f, s] : cube_boundary(cur)) {
            (void)s;
            if (!seen.count(f)) stack.push_back(f);
        }
    }
    return {seen.begin(), seen.end()};
}

void CubicalSet::insert_closed(const Cube& c) {
    if (c.ambient_dim() != ambient_dim)
        throw DimensionMismatch("cube ambient dimension does not match cubical set");
    for (auto& f : cube_closure(c)) cells.insert(f);
}

bool CubicalSet::closed() const {
    for (const auto& c : cells)
        for (auto& [f, s] : cube_boundary(c)) {
            (void)s;
            if (!cells.count(f)) return false;
        }
    return true;
}

bool CubicalSet::subset_of(const CubicalSet& other) const {
    for (const auto& c : cells)
        if (!other.cells.count(c)) return false;
    return true;
}

std::vector<Cube> CubicalSet::cells_of_dim(int k) const {
    std::vector<Cube> out;
    for (const auto& c : cells)
        if (c.dim() == k) out.push_back(c);
    return out;
}

int CubicalSet::max_dim() const {
    int m = -1;
    for (const auto& c : cells) m = std::max(m, c.dim());
    return m;
}

}  // namespace foldcert
