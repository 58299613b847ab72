#include "foldcert/lyapunov.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace foldcert {

size_t GridScalarField::node_count() const {
    size_t c = 1;
    for (int r : res) c *= static_cast<size_t>(r) + 1;
    return c;
}

size_t GridScalarField::node_index(const std::vector<int>& idx) const {
    size_t lin = 0;
    for (int i = dim() - 1; i >= 0; --i) lin = lin * (res[i] + 1) + idx[i];
    return lin;
}

void GridScalarField::compute_gradients() {
    int n = dim();
    node_gradients.assign(n, std::vector<double>(node_count(), 0.0));
    std::vector<int> idx(n, 0);
    while (true) {
        size_t lin = node_index(idx);
        for (int a = 0; a < n; ++a) {
            double h = step(a);
            std::vector<int> up = idx, dn = idx;
            up[a] = std::min(idx[a] + 1, res[a]);
            dn[a] = std::max(idx[a] - 1, 0);
            double num = values[node_index(up)] - values[node_index(dn)];
            double den = (up[a] - dn[a]) * h;
            node_gradients[a][lin] = den > 0 ? num / den : 0.0;
        }
        int c = 0;
        while (c < n) {
            if (++idx[c] <= res[c]) break;
            idx[c] = 0;
            ++c;
        }
        if (c == n) break;
    }
}

namespace {

// multilinear interpolation weights for a point
struct InterpCell {
    std::vector<int> base;
    std::vector<double> frac;
};

InterpCell locate(const Box& domain, const std::vector<int>& res, const Vec& p) {
    int n = domain.dim();
    InterpCell c;
    c.base.resize(n);
    c.frac.resize(n);
    for (int i = 0; i < n; ++i) {
        double h = domain.iv[i].width() / res[i];
        double t = (p[i] - domain.iv[i].lo) / h;
        int b = static_cast<int>(std::floor(t));
        b = std::max(0, std::min(b, res[i] - 1));
        c.base[i] = b;
        c.frac[i] = std::min(1.0, std::max(0.0, t - b));
    }
    return c;
}

double interpolate(const GridScalarField& g, const std::vector<double>& grid,
                   const InterpCell& c) {
    int n = g.dim();
    double acc = 0.0;
    int corners = 1 << n;
    std::vector<int> idx(n);
    for (int mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            bool hi = (mask >> i) & 1;
            idx[i] = c.base[i] + (hi ? 1 : 0);
            w *= hi ? c.frac[i] : 1.0 - c.frac[i];
        }
        if (w != 0.0) acc += w * grid[g.node_index(idx)];
    }
    return acc;
}

}  // namespace

double GridScalarField::value(const Vec& p) const {
    return interpolate(*this, values, locate(domain, res, p));
}

Vec GridScalarField::gradient(const Vec& p) const {
    InterpCell c = locate(domain, res, p);
    Vec out(dim());
    for (int a = 0; a < dim(); ++a) out[a] = interpolate(*this, node_gradients[a], c);
    return out;
}

void GridScalarField::smooth(int passes, const std::vector<char>& pinned) {
    int n = dim();
    for (int pass = 0; pass < passes; ++pass) {
        for (int a = 0; a < n; ++a) {
            std::vector<double> next = values;
            std::vector<int> idx(n, 0);
            while (true) {
                size_t lin = node_index(idx);
                if (!pinned.empty() && pinned[lin]) {
                    // keep Dirichlet levels
                } else if (idx[a] > 0 && idx[a] < res[a]) {
                    std::vector<int> up = idx, dn = idx;
                    up[a] += 1;
                    dn[a] -= 1;
                    next[lin] = 0.25 * values[node_index(dn)] + 0.5 * values[lin] +
                                0.25 * values[node_index(up)];
                }
                int c = 0;
                while (c < n) {
                    if (++idx[c] <= res[c]) break;
                    idx[c] = 0;
                    ++c;
                }
                if (c == n) break;
            }
            values = std::move(next);
        }
    }
}

double LyapunovFunction::value(const Vec& x, double lambda) const {
    Vec p(x.size() + 1);
    p.head(x.size()) = x;
    p[x.size()] = lambda;
    return g.value(p);
}

Vec LyapunovFunction::grad_x(const Vec& x, double lambda) const {
    Vec p(x.size() + 1);
    p.head(x.size()) = x;
    p[x.size()] = lambda;
    return g.gradient(p).head(x.size());
}

bool LyapunovFunction::in_s_neighborhood(const Vec& x, double lambda, int halo) const {
    int n = static_cast<int>(phase_cells.size());
    std::vector<int> cell(n);
    for (int i = 0; i < n; ++i) {
        double h = g.domain.iv[i].width() / phase_cells[i];
        int c = static_cast<int>(std::floor((x[i] - g.domain.iv[i].lo) / h));
        cell[i] = std::max(0, std::min(c, phase_cells[i] - 1));
    }
    int lnode = static_cast<int>(std::lround(lambda * (lambda_nodes - 1)));
    lnode = std::max(0, std::min(lnode, lambda_nodes - 1));

    // scan the halo box around (cell, lambda node)
    std::vector<int> off(n + 1, -halo);
    while (true) {
        bool ok = true;
        size_t lin = 0;
        for (int i = n - 1; i >= 0; --i) {
            int c = cell[i] + off[i];
            if (c < 0 || c >= phase_cells[i]) {
                ok = false;
                break;
            }
            lin = lin * phase_cells[i] + c;
        }
        int ln = lnode + off[n];
        if (ln < 0 || ln >= lambda_nodes) ok = false;
        if (ok && s_nbhd[lin * lambda_nodes + ln]) return true;
        int c = 0;
        while (c <= n) {
            if (++off[c] <= halo) break;
            off[c] = -halo;
            ++c;
        }
        if (c == n + 1) break;
    }
    return false;
}

namespace {

Vec rk4_step(const FieldFn& f, const Vec& x, double lambda, double dt) {
    Vec k1 = f(x, lambda);
    Vec k2 = f(x + 0.5 * dt * k1, lambda);
    Vec k3 = f(x + 0.5 * dt * k2, lambda);
    Vec k4 = f(x + dt * k3, lambda);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool orbit_stays(const FieldFn& f, Vec x, double lambda, const Box& box, double horizon,
                 double dt, bool backward) {
    double sgn = backward ? -1.0 : 1.0;
    int steps = static_cast<int>(horizon / dt);
    for (int s = 0; s < steps; ++s) {
        x = rk4_step(f, x, lambda, sgn * dt);
        if (!x.allFinite()) return false;
        if (!box.contains(x)) return false;
    }
    return true;
}

}  // namespace

LyapunovFunction build_lyapunov(const IsolatingBlock& block, const BlockPair& pair,
                                const FieldFn& field, const LyapunovOptions& opts) {
    const Grid& grid = block.region.grid;
    int n = grid.phase_dim();
    Box phase_box = block.region.bounding_box();

    LyapunovFunction lf;
    lf.g.domain.iv = phase_box.iv;
    lf.g.domain.iv.push_back({0.0, 1.0});
    int refine = std::max(1, opts.refine);
    lf.g.res.resize(n);
    for (int i = 0; i < n; ++i) lf.g.res[i] = grid.resolution[i] * refine;
    lf.g.res.push_back(opts.lambda_res);
    size_t nodes = lf.g.node_count();
    lf.g.values.assign(nodes, 0.0);
    int d = n + 1;

    // S-neighborhood estimate first: phase cells whose forward and backward
    // orbits stay inside the block for the declared horizon.  The mask's
    // lambda nodes coincide with the solver's lambda nodes.
    lf.phase_cells.assign(grid.resolution.begin(), grid.resolution.end());
    lf.lambda_nodes = opts.lambda_res + 1;
    size_t cell_total = 1;
    for (int c : lf.phase_cells) cell_total *= static_cast<size_t>(c);
    lf.s_nbhd.assign(cell_total * lf.lambda_nodes, 0);

    {
        std::vector<int> cell(n, 0);
        while (true) {
            size_t cell_lin = 0;
            for (int i = n - 1; i >= 0; --i)
                cell_lin = cell_lin * lf.phase_cells[i] + cell[i];
            Vec center(n);
            for (int i = 0; i < n; ++i) {
                double h = phase_box.iv[i].width() / lf.phase_cells[i];
                center[i] = phase_box.iv[i].lo + (cell[i] + 0.5) * h;
            }
            for (int li = 0; li < lf.lambda_nodes; ++li) {
                double lambda = static_cast<double>(li) / (lf.lambda_nodes - 1);
                bool fwd = orbit_stays(field, center, lambda, phase_box,
                                       opts.orbit_horizon, opts.orbit_step, false);
                bool bwd = fwd && orbit_stays(field, center, lambda, phase_box,
                                              opts.orbit_horizon, opts.orbit_step, true);
                if (fwd && bwd) lf.s_nbhd[cell_lin * lf.lambda_nodes + li] = 1;
            }
            int c = 0;
            while (c < n) {
                if (++cell[c] < lf.phase_cells[c]) break;
                cell[c] = 0;
                ++c;
            }
            if (c == n) break;
        }
    }

    (void)pair;

    // Dirichlet data: -1 on exit faces, +1 on entrance faces (exit wins on
    // shared corners so the exit level is honored exactly).
    std::vector<char> pinned(nodes, 0);
    std::vector<double> pin_value(nodes, 0.0);

    {
        std::vector<int> idx(d, 0);
        while (true) {
            bool is_exit = false, is_entrance = false;
            for (const auto& f : block.faces) {
                if (f.role == FaceRole::Tangency) continue;
                double step_a = phase_box.iv[f.axis].width() / lf.g.res[f.axis];
                int face_node = static_cast<int>(
                    std::lround((f.coordinate - phase_box.iv[f.axis].lo) / step_a));
                if (idx[f.axis] != face_node) continue;
                // node must lie in the span of some member cell's cross-section
                bool in_span = false;
                for (const auto& cell : f.member_cells) {
                    bool ok = true;
                    for (int i = 0; i < n; ++i) {
                        if (i == f.axis) continue;
                        if (idx[i] < cell[i] * refine || idx[i] > (cell[i] + 1) * refine)
                            ok = false;
                    }
                    if (ok) {
                        in_span = true;
                        break;
                    }
                }
                if (!in_span) continue;
                if (f.role == FaceRole::Exit) is_exit = true;
                if (f.role == FaceRole::Entrance) is_entrance = true;
            }
            if (is_exit || is_entrance) {
                size_t lin = lf.g.node_index(idx);
                pinned[lin] = 1;
                pin_value[lin] = is_exit ? -1.0 : 1.0;
            }
            int c = 0;
            while (c < d) {
                if (++idx[c] <= lf.g.res[c]) break;
                idx[c] = 0;
                ++c;
            }
            if (c == d) break;
        }
    }

    // When the core potential covers every node the harmonic baseline is
    // never blended in; skip the solve.
    bool need_harmonic = true;
    if (opts.core) {
        need_harmonic = false;
        std::vector<int> idx(d, 0);
        while (true) {
            Vec x(n);
            for (int i = 0; i < n; ++i)
                x[i] = phase_box.iv[i].lo + idx[i] * phase_box.iv[i].width() / lf.g.res[i];
            if (opts.core->weight.value(x) < 1.0) {
                need_harmonic = true;
                break;
            }
            int c = 0;
            while (c < d) {
                if (++idx[c] <= lf.g.res[c]) break;
                idx[c] = 0;
                ++c;
            }
            if (c == d) break;
        }
    }

    // Graph Laplacian with natural boundary on unpinned faces.
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nodes);
    if (need_harmonic) {
        std::vector<int> idx(d, 0);
        while (true) {
            size_t lin = lf.g.node_index(idx);
            if (pinned[lin]) {
                trip.emplace_back(lin, lin, 1.0);
                rhs[lin] = pin_value[lin];
            } else {
                double deg = 0.0;
                for (int a = 0; a < d; ++a) {
                    for (int s : {-1, +1}) {
                        int v = idx[a] + s;
                        if (v < 0 || v > lf.g.res[a]) continue;
                        std::vector<int> nb = idx;
                        nb[a] = v;
                        trip.emplace_back(lin, lf.g.node_index(nb), -1.0);
                        deg += 1.0;
                    }
                }
                trip.emplace_back(lin, lin, deg);
            }
            int c = 0;
            while (c < d) {
                if (++idx[c] <= lf.g.res[c]) break;
                idx[c] = 0;
                ++c;
            }
            if (c == d) break;
        }
    }
    if (need_harmonic) {
        Eigen::SparseMatrix<double> A(nodes, nodes);
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
        solver.compute(A);
        if (solver.info() != Eigen::Success)
            throw Error("Laplace solve failed to factorize");
        Eigen::VectorXd u = solver.solve(rhs);
        if (solver.info() != Eigen::Success) throw Error("Laplace solve failed");
        for (size_t i = 0; i < nodes; ++i) lf.g.values[i] = u[i];
    }

    // Splice the canonical-model potential over the block interior: the
    // harmonic profile cannot descend along a connecting channel that spans
    // the block cross-section, the model potential does.
    if (opts.core) {
        std::vector<double> core_vals(nodes, 0.0);
        std::vector<double> weights(nodes, 0.0);
        double core_max = 0.0;
        std::vector<int> idx(d, 0);
        while (true) {
            size_t lin = lf.g.node_index(idx);
            Vec x(n);
            for (int i = 0; i < n; ++i)
                x[i] = phase_box.iv[i].lo + idx[i] * phase_box.iv[i].width() / lf.g.res[i];
            double lambda = static_cast<double>(idx[n]) / lf.g.res[n];
            double w = opts.core->weight.value(x);
            weights[lin] = w;
            if (w > 0.0) {
                core_vals[lin] = opts.core->value(x, lambda);
                core_max = std::max(core_max, std::abs(core_vals[lin]));
            }
            int c = 0;
            while (c < d) {
                if (++idx[c] <= lf.g.res[c]) break;
                idx[c] = 0;
                ++c;
            }
            if (c == d) break;
        }
        double nu = core_max > 1e-12 ? 0.8 / core_max : 1.0;
        for (size_t i = 0; i < nodes; ++i)
            lf.g.values[i] =
                weights[i] * nu * core_vals[i] + (1.0 - weights[i]) * lf.g.values[i];
    }

    lf.g.smooth(opts.smoothing_passes, pinned);

    // Recenter: the estimated invariant-set neighborhood should sit near 0.
    {
        double sum = 0.0;
        size_t count = 0;
        std::vector<int> cell(n, 0);
        while (true) {
            size_t cell_lin = 0;
            for (int i = n - 1; i >= 0; --i)
                cell_lin = cell_lin * lf.phase_cells[i] + cell[i];
            Vec center(n);
            for (int i = 0; i < n; ++i) {
                double h = phase_box.iv[i].width() / lf.phase_cells[i];
                center[i] = phase_box.iv[i].lo + (cell[i] + 0.5) * h;
            }
            for (int li = 0; li < lf.lambda_nodes; ++li) {
                if (!lf.s_nbhd[cell_lin * lf.lambda_nodes + li]) continue;
                double lambda = static_cast<double>(li) / (lf.lambda_nodes - 1);
                sum += lf.value(center, lambda);
                ++count;
            }
            int c = 0;
            while (c < n) {
                if (++cell[c] < lf.phase_cells[c]) break;
                cell[c] = 0;
                ++c;
            }
            if (c == n) break;
        }
        if (count > 0) {
            double mean = sum / count;
            for (auto& v : lf.g.values) v -= mean;
        }
    }
    lf.g.compute_gradients();

    // Decrease inequality on the declared sample mesh outside the
    // (halo-inflated) S-neighborhood.
    std::vector<Eigen::VectorXd> samples;
    double worst = std::numeric_limits<double>::infinity();
    Vec worst_pt;
    double worst_lambda = 0.0;
    std::vector<int> s_idx(n, 0);
    while (true) {
        Vec x(n);
        for (int i = 0; i < n; ++i)
            x[i] = phase_box.iv[i].lo +
                   phase_box.iv[i].width() * (s_idx[i] + 0.5) / opts.samples_per_axis;
        for (int li = 0; li < opts.lambda_samples; ++li) {
            double lambda = static_cast<double>(li) / (opts.lambda_samples - 1);
            if (lf.in_s_neighborhood(x, lambda, opts.halo_cells)) continue;
            double margin = -lf.grad_x(x, lambda).dot(field(x, lambda));
            Eigen::VectorXd row(n + 1);
            row.head(n) = x;
            row[n] = lambda;
            samples.push_back(row);
            if (margin < worst) {
                worst = margin;
                worst_pt = x;
                worst_lambda = lambda;
            }
        }
        int c = 0;
        while (c < n) {
            if (++s_idx[c] < opts.samples_per_axis) break;
            s_idx[c] = 0;
            ++c;
        }
        if (c == n) break;
    }
    lf.decrease_samples.resize(samples.size(), n + 1);
    for (size_t i = 0; i < samples.size(); ++i) lf.decrease_samples.row(i) = samples[i];
    lf.worst_margin = worst;

    if (samples.empty())
        throw DecreaseFailed(
            "estimated S-neighborhood covers the whole block; nothing to verify");
    if (!(worst > 0.0)) {
        std::ostringstream os;
        os << "decrease inequality violated: margin " << format_real(worst) << " at x=(";
        for (int i = 0; i < n; ++i) os << (i ? "," : "") << worst_pt[i];
        os << ") lambda=" << worst_lambda;
        if (std::getenv("FOLDCERT_DEBUG")) {
            os << "\n  grad_g=(" << lf.grad_x(worst_pt, worst_lambda).transpose()
               << ") field=(" << field(worst_pt, worst_lambda).transpose()
               << ") g=" << lf.value(worst_pt, worst_lambda);
        }
        throw DecreaseFailed(os.str());
    }
    return lf;
}

}  // namespace foldcert
