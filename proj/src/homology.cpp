#include "foldcert/homology.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace foldcert {

long long ChainComplex::euler_characteristic() const {
    long long chi = 0;
    int sign = 1;
    for (const auto& b : basis) {
        chi += sign * static_cast<long long>(b.size());
        sign = -sign;
    }
    return chi;
}

bool ChainComplex::boundary_squares_to_zero() const {
    for (size_t k = 1; k + 1 < boundary.size(); ++k)
        if (!is_zero_product(boundary[k], boundary[k + 1])) return false;
    return true;
}

bool HomologyResult::trivial() const {
    for (int b : betti)
        if (b != 0) return false;
    for (const auto& t : torsion)
        if (!t.empty()) return false;
    return true;
}

bool HomologyResult::is_z_in_single_degree(int degree) const {
    if (degree < 0 || degree >= static_cast<int>(betti.size())) return false;
    for (int k = 0; k < static_cast<int>(betti.size()); ++k) {
        if (betti[k] != (k == degree ? 1 : 0)) return false;
        if (!torsion[k].empty()) return false;
    }
    return true;
}

std::string HomologyResult::summary() const {
    std::ostringstream os;
    for (size_t k = 0; k < betti.size(); ++k) {
        if (k) os << " ";
        os << "H" << k << "=" << betti[k];
        if (!torsion[k].empty()) {
            os << "+t(";
            for (size_t i = 0; i < torsion[k].size(); ++i)
                os << (i ? "," : "") << torsion[k][i];
            os << ")";
        }
    }
    return os.str();
}

namespace {

IntMat boundary_in_bases(const std::vector<Cube>& domain, const std::vector<Cube>& target,
                         const CubicalSet* drop) {
    std::map<Cube, int> index;
    for (size_t i = 0; i < target.size(); ++i) index[target[i]] = static_cast<int>(i);
    IntMat D(static_cast<int>(target.size()), static_cast<int>(domain.size()));
    for (size_t j = 0; j < domain.size(); ++j) {
        for (auto& [face, coef] : cube_boundary(domain[j])) {
            if (drop && drop->contains(face)) continue;
            auto it = index.find(face);
            if (it == index.end()) continue;
            D.at(it->second, static_cast<int>(j)) += coef;
        }
    }
    return D;
}

}  // namespace

IntMat boundary_matrix(const CubicalSet& cs, int degree) {
    auto domain = cs.cells_of_dim(degree);
    auto target = cs.cells_of_dim(degree - 1);
    return boundary_in_bases(domain, target, nullptr);
}

ChainComplex relative_chain_complex_ordered(const CubicalSet& N, const CubicalSet& L,
                                            const std::vector<Cube>& order) {
    if (!L.empty() && !L.subset_of(N))
        throw NotASubcomplex("L is not contained in N");
    if (!N.closed() || !L.closed())
        throw NotASubcomplex("pair members must be closed complexes");

    ChainComplex cc;
    cc.ambient_dim = N.ambient_dim;
    cc.basis.assign(N.ambient_dim + 1, {});
    for (const auto& c : order) {
        if (!N.contains(c) || L.contains(c))
            throw NotASubcomplex("basis order must enumerate cells of N minus L");
        cc.basis[c.dim()].push_back(c);
    }
    size_t total = 0;
    for (auto& b : cc.basis) total += b.size();
    size_t expect = 0;
    for (const auto& c : N.cells)
        if (!L.contains(c)) ++expect;
    if (total != expect) throw NotASubcomplex("basis order misses relative cells");

    cc.boundary.resize(N.ambient_dim + 1);
    cc.boundary[0] = IntMat(0, cc.cells_in_degree(0));
    for (int k = 1; k <= N.ambient_dim; ++k)
        cc.boundary[k] = boundary_in_bases(cc.basis[k], cc.basis[k - 1], &L);
    return cc;
}

ChainComplex relative_chain_complex(const CubicalSet& N, const CubicalSet& L) {
    std::vector<Cube> order;
    for (const auto& c : N.cells)
        if (!L.contains(c)) order.push_back(c);
    std::sort(order.begin(), order.end());
    return relative_chain_complex_ordered(N, L, order);
}

HomologyResult homology_of(const ChainComplex& cc) {
    int top = cc.ambient_dim;
    HomologyResult h;
    h.betti.assign(top + 1, 0);
    h.torsion.assign(top + 1, {});
    std::vector<SmithResult> snf(top + 2);
    for (int k = 0; k <= top; ++k) snf[k] = smith_normal_form(cc.boundary[k]);
    snf[top + 1] = SmithResult{};  // no cells above ambient dimension

    for (int k = 0; k <= top; ++k) {
        int nk = cc.cells_in_degree(k);
        int rk = snf[k].rank;
        int rk1 = k + 1 <= top ? snf[k + 1].rank : 0;
        h.betti[k] = nk - rk - rk1;
        if (k + 1 <= top)
            for (const auto& d : snf[k + 1].divisors) {
                long long v = std::stoll(d);
                if (v > 1) h.torsion[k].push_back(v);
            }
    }
    return h;
}

HomologyResult relative_homology(const CubicalSet& N, const CubicalSet& L) {
    return homology_of(relative_chain_complex(N, L));
}

}  // namespace foldcert
