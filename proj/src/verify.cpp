#include "foldcert/verify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace foldcert {

namespace {

Vec rk4(const FieldFn& f, const Vec& x, double lambda, double dt) {
    Vec k1 = f(x, lambda);
    Vec k2 = f(x + 0.5 * dt * k1, lambda);
    Vec k3 = f(x + 0.5 * dt * k2, lambda);
    Vec k4 = f(x + dt * k3, lambda);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory integrate(const FieldFn& field, const Vec& x0, double lambda, double T,
                     double step, const Box& box) {
    if (step <= 0.0) throw ConfigInvalid("integration step must be positive");
    Trajectory tr;
    tr.step = step;
    Vec x = x0;
    tr.points.push_back(x);
    int steps = static_cast<int>(std::ceil(T / step));
    for (int s = 0; s < steps; ++s) {
        x = rk4(field, x, lambda, step);
        if (!x.allFinite()) throw NonFiniteValue("trajectory left the finite range");
        tr.points.push_back(x);
        if (!box.contains(x)) {
            tr.exited = true;
            tr.exit_time = (s + 1) * step;
            break;
        }
    }
    return tr;
}

int Equilibrium::unstable_dimension(double tol) const {
    int k = 0;
    for (const auto& e : eigenvalues)
        if (e.real() > tol) ++k;
    return k;
}

bool Equilibrium::hyperbolic(double tol) const {
    for (const auto& e : eigenvalues)
        if (std::abs(e.real()) < tol) return false;
    return true;
}

double Equilibrium::smallest_eigen_magnitude() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : eigenvalues) m = std::min(m, std::abs(e));
    return m;
}

Eigen::MatrixXd fd_jacobian(const FieldFn& field, const Vec& x, double lambda,
                            double fd_step) {
    int n = static_cast<int>(x.size());
    double h = fd_step * (1.0 + x.norm());
    Eigen::MatrixXd J(n, n);
    for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (field(xp, lambda) - field(xm, lambda)) / (2.0 * h);
    }
    return J;
}

namespace {

std::optional<Vec> newton_root(const FieldFn& field, Vec x, double lambda,
                               const NewtonOptions& opts, const Box& box) {
    // Iterate past the acceptance tolerance while progress continues: at a
    // fold the root is a double zero and every extra step halves the
    // distance, which is what pushes the near-zero eigenvalue down.
    Vec best_x = x;
    double best_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iter; ++it) {
        Vec fx = field(x, lambda);
        if (!fx.allFinite()) break;
        double norm = fx.norm();
        if (norm < best_norm) {
            best_norm = norm;
            best_x = x;
        }
        if (norm == 0.0) break;
        Eigen::MatrixXd J = fd_jacobian(field, x, lambda, opts.fd_step);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        Vec dx;
        if (lu.isInvertible()) {
            dx = lu.solve(-fx);
        } else {
            // degenerate jacobian: damped gradient-like fallback
            dx = -J.transpose() * fx;
            double nj = dx.norm();
            if (nj < 1e-14) break;
            dx *= std::min(1.0, norm / nj) / std::max(nj, 1.0);
        }
        if (!dx.allFinite()) break;
        // backtracking on |f|
        double t = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Vec xn = x + t * dx;
            Vec fn = field(xn, lambda);
            if (fn.allFinite() && fn.norm() < norm) {
                x = xn;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
        if (!box.contains(x, box.diameter())) break;  // ran far away
    }
    return best_norm < opts.tol ? std::optional<Vec>(best_x) : std::nullopt;
}

Equilibrium make_equilibrium(const FieldFn& field, const Vec& x, double lambda,
                             const NewtonOptions& opts) {
    Equilibrium eq;
    eq.x = x;
    eq.residual = field(x, lambda).norm();
    eq.jacobian = fd_jacobian(field, x, lambda, opts.fd_step);
    Eigen::EigenSolver<Eigen::MatrixXd> es(eq.jacobian);
    for (int i = 0; i < eq.jacobian.rows(); ++i)
        eq.eigenvalues.push_back(es.eigenvalues()[i]);
    std::sort(eq.eigenvalues.begin(), eq.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return a.real() < b.real();
              });
    return eq;
}

}  // namespace

std::vector<Vec> grid_seeds(const Box& box, int per_axis) {
    int n = box.dim();
    std::vector<Vec> seeds;
    std::vector<int> idx(n, 0);
    while (true) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            const auto& I = box.iv[i];
            x[i] = per_axis <= 1 ? I.mid()
                                 : I.lo + I.width() * (idx[i] + 0.5) / per_axis;
        }
        seeds.push_back(x);
        int c = 0;
        while (c < n) {
            if (++idx[c] < per_axis) break;
            idx[c] = 0;
            ++c;
        }
        if (c == n) break;
    }
    return seeds;
}

std::vector<Equilibrium> find_equilibria(const FieldFn& field, double lambda,
                                         const Box& box, const std::vector<Vec>& seeds,
                                         const NewtonOptions& opts) {
    std::vector<Equilibrium> out;
    double scale = std::max(box.diameter(), 1e-12);
    for (const Vec& s : seeds) {
        auto root = newton_root(field, s, lambda, opts, box);
        if (!root) continue;
        if (!box.contains(*root, 1e-9)) continue;
        bool dup = false;
        for (const auto& e : out)
            if ((e.x - *root).norm() < opts.dedupe_tol * scale) dup = true;
        if (dup) continue;
        out.push_back(make_equilibrium(field, *root, lambda, opts));
    }
    std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
        for (int i = 0; i < a.x.size(); ++i)
            if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
        return false;
    });
    return out;
}

// ---------------------------------------------------------------------------

SaddleNodeDiagnostics saddle_node_test(const FieldFn& field, const BranchPair& pair,
                                       double lambda0, const Box& box,
                                       const NewtonOptions& opts) {
    SaddleNodeDiagnostics diag;
    if (pair.lambdas.size() < 5)
        throw InsufficientData("branch pair needs at least 5 points");

    // (b) gap exponent over the supplied lambdas
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = 0; i < pair.lambdas.size(); ++i) {
        double mu = lambda0 - pair.lambdas[i];
        double gap = (pair.attractor_x[i] - pair.repeller_x[i]).norm();
        if (mu <= 0.0 || gap <= 0.0) continue;
        double lx = std::log(mu), ly = std::log(gap);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 5) throw InsufficientData("too few pre-fold points with positive gap");
    diag.gap_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    // (a) eigenvalue split at the fold point
    std::vector<Vec> seeds = {pair.attractor_x.back(), pair.repeller_x.back(),
                              0.5 * (pair.attractor_x.back() + pair.repeller_x.back())};
    auto at_fold = find_equilibria(field, lambda0, box, seeds, opts);
    if (at_fold.empty()) {
        // fall back to the midpoint as the degenerate equilibrium estimate
        diag.failure = "no equilibrium found at lambda0";
        diag.pass = false;
        return diag;
    }
    const Equilibrium& deg = at_fold.front();
    diag.eigenvalue_at_fold = deg.smallest_eigen_magnitude();
    double other = std::numeric_limits<double>::infinity();
    double smallest = diag.eigenvalue_at_fold;
    for (const auto& e : deg.eigenvalues) {
        double mag = std::abs(e);
        if (std::abs(mag - smallest) < 1e-12) continue;
        other = std::min(other, mag);
    }
    diag.other_eigen_min = std::isfinite(other) ? other : 0.0;
    if (deg.eigenvalues.size() == 1) diag.other_eigen_min = 1.0;  // nothing else to vanish

    // (c) quadratic nondegeneracy along the null direction
    Eigen::EigenSolver<Eigen::MatrixXd> es(deg.jacobian);
    int null_idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < deg.jacobian.rows(); ++i) {
        double mag = std::abs(es.eigenvalues()[i]);
        if (mag < best) {
            best = mag;
            null_idx = i;
        }
    }
    Vec v = es.eigenvectors().col(null_idx).real();
    if (v.norm() < 1e-12) v = Vec::Ones(deg.x.size());
    v.normalize();
    double h = 1e-4 * (1.0 + deg.x.norm());
    Vec fp = field(deg.x + h * v, lambda0);
    Vec f0 = field(deg.x, lambda0);
    Vec fm = field(deg.x - h * v, lambda0);
    diag.quadratic_coefficient = v.dot(fp - 2.0 * f0 + fm) / (h * h);

    bool a_ok = diag.eigenvalue_at_fold < 1e-6 && diag.other_eigen_min > 1e-3;
    bool b_ok = diag.gap_exponent >= 0.45 && diag.gap_exponent <= 0.55;
    bool c_ok = std::abs(diag.quadratic_coefficient) > 1e-3;
    diag.pass = a_ok && b_ok && c_ok;
    if (!diag.pass) {
        std::ostringstream os;
        if (!a_ok)
            os << "(a) eigenvalue split failed: |eig0|=" << diag.eigenvalue_at_fold
               << ", others>=" << diag.other_eigen_min << "; ";
        if (!b_ok) os << "(b) gap exponent " << diag.gap_exponent << " outside [0.45,0.55]; ";
        if (!c_ok)
            os << "(c) quadratic coefficient " << diag.quadratic_coefficient
               << " too small; ";
        diag.failure = os.str();
    }
    return diag;
}

HeteroclinicResult heteroclinic_check(const FieldFn& field, double lambda,
                                      const Equilibrium& repeller,
                                      const Equilibrium& attractor, double offset,
                                      const Box& box, double horizon, double step) {
    // unstable eigenvector of the repeller
    Eigen::EigenSolver<Eigen::MatrixXd> es(repeller.jacobian);
    int idx = -1;
    double best = 0.0;
    for (int i = 0; i < repeller.jacobian.rows(); ++i) {
        double re = es.eigenvalues()[i].real();
        if (re > best) {
            best = re;
            idx = i;
        }
    }
    if (idx < 0) return HeteroclinicResult::Inconclusive;  // no unstable direction
    Vec v = es.eigenvectors().col(idx).real();
    if (v.norm() < 1e-12) return HeteroclinicResult::Inconclusive;
    v.normalize();

    double conv_radius = 1e-6 * (1.0 + box.diameter());
    int connected = 0, exited = 0, inconclusive = 0;
    for (double s : {+1.0, -1.0}) {
        Vec x = repeller.x + s * offset * v;
        double t = 0.0;
        bool done = false;
        while (t < horizon) {
            x = rk4(field, x, lambda, step);
            t += step;
            if (!x.allFinite()) return HeteroclinicResult::Inconclusive;
            if ((x - attractor.x).norm() < conv_radius) {
                ++connected;
                done = true;
                break;
            }
            if (!box.contains(x)) {
                ++exited;
                done = true;
                break;
            }
        }
        if (!done) ++inconclusive;
    }
    if (inconclusive > 0) return HeteroclinicResult::Inconclusive;
    // exactly one side connects, the other leaves the block
    return connected == 1 && exited == 1 ? HeteroclinicResult::Pass
                                         : HeteroclinicResult::Fail;
}

OmegaEstimate estimate_omega_limit(const FieldFn& field, const Vec& x0, double lambda,
                                   double horizon, double step, const Box& box) {
    Trajectory tr = integrate(field, x0, lambda, horizon, step, box);
    OmegaEstimate est;
    if (tr.exited) {
        est.escaped = true;
        return est;
    }
    size_t tail_start = tr.points.size() - std::max<size_t>(1, tr.points.size() / 10);
    int n = static_cast<int>(x0.size());
    est.bounding_box.iv.assign(n, {std::numeric_limits<double>::infinity(),
                                   -std::numeric_limits<double>::infinity()});
    for (size_t i = tail_start; i < tr.points.size(); ++i)
        for (int a = 0; a < n; ++a) {
            est.bounding_box.iv[a].lo = std::min(est.bounding_box.iv[a].lo, tr.points[i][a]);
            est.bounding_box.iv[a].hi = std::max(est.bounding_box.iv[a].hi, tr.points[i][a]);
        }
    return est;
}

VerificationReport verify_C1_C2_C3(const FieldFn& h, const Box& box, int k,
                                   double lambda0, const VerifyOptions& opts) {
    VerificationReport rep;
    auto seeds = grid_seeds(box, opts.seeds_per_axis);
    std::ostringstream detail;

    // lambda0 estimate from the fold of the attracting branch
    bool fold_found = false;
    {
        auto below = find_equilibria(h, std::max(0.0, lambda0 - 0.2), box, seeds,
                                     opts.newton);
        for (const auto& eq : below) {
            if (eq.unstable_dimension() != k - 1) continue;
            auto branch = continue_branch(h, {0.0, 1.0}, eq.x,
                                          std::max(0.0, lambda0 - 0.2),
                                          opts.continuation);
            if (branch.fold_detected) {
                rep.lambda0_estimate = branch.fold_lambda;
                fold_found = true;
                break;
            }
        }
        if (!fold_found) {
            detail << "no fold detected along the attracting branch; ";
            rep.lambda0_estimate = lambda0;
        }
    }

    // census sweep
    bool c1 = true, c3 = true;
    for (int i = 0; i < opts.lambda_mesh; ++i) {
        double lambda = opts.lambda_mesh <= 1
                            ? 0.0
                            : static_cast<double>(i) / (opts.lambda_mesh - 1);
        if (std::abs(lambda - lambda0) < opts.mesh_margin) continue;
        VerificationReport::Census c;
        c.lambda = lambda;
        auto eqs = find_equilibria(h, lambda, box, seeds, opts.newton);
        c.count = static_cast<int>(eqs.size());
        for (const auto& e : eqs) {
            c.unstable_dims.push_back(e.unstable_dimension());
            c.hyperbolic = c.hyperbolic && e.hyperbolic();
        }
        std::sort(c.unstable_dims.begin(), c.unstable_dims.end());
        if (lambda < lambda0) {
            bool census_ok = c.count == 2 && c.hyperbolic &&
                             c.unstable_dims == std::vector<int>{k - 1, k};
            if (census_ok) {
                const Equilibrium& att =
                    eqs[0].unstable_dimension() == k - 1 ? eqs[0] : eqs[1];
                const Equilibrium& rpl =
                    eqs[0].unstable_dimension() == k ? eqs[0] : eqs[1];
                double offset = 1e-4 * box.diameter();
                c.heteroclinic = heteroclinic_check(h, lambda, rpl, att, offset, box);
                census_ok = c.heteroclinic == HeteroclinicResult::Pass;
            }
            if (!census_ok) {
                c1 = false;
                detail << "C1 fails at lambda=" << lambda << " (count=" << c.count
                       << "); ";
            }
        } else {
            bool empty_ok = c.count == 0;
            c.orbits_exit = true;
            for (const auto& s : seeds) {
                Trajectory tr = integrate(h, s, lambda, 1e3, 1e-2, box);
                if (!tr.exited) {
                    c.orbits_exit = false;
                    break;
                }
            }
            if (!empty_ok || !c.orbits_exit) {
                c3 = false;
                detail << "C3 fails at lambda=" << lambda << " (count=" << c.count
                       << ", exit=" << (c.orbits_exit ? "yes" : "no") << "); ";
            }
        }
        rep.census.push_back(std::move(c));
    }
    rep.c1_pass = c1;
    rep.c3_pass = c3;

    // saddle-node signature across two decades below the fold
    {
        BranchPair pair;
        bool built = true;
        for (int i = 0; i <= 8; ++i) {
            double mu = std::pow(10.0, -4.0 + 0.25 * i);  // 1e-4 .. 1e-2
            double lambda = lambda0 - mu;
            auto eqs = find_equilibria(h, lambda, box, seeds, opts.newton);
            if (eqs.size() != 2) {
                built = false;
                detail << "branch pair census failed at mu=" << mu << "; ";
                break;
            }
            const Equilibrium& att =
                eqs[0].unstable_dimension() == k - 1 ? eqs[0] : eqs[1];
            const Equilibrium& rpl = eqs[0].unstable_dimension() == k ? eqs[0] : eqs[1];
            if (att.unstable_dimension() != k - 1 || rpl.unstable_dimension() != k) {
                built = false;
                detail << "branch pair stability failed at mu=" << mu << "; ";
                break;
            }
            pair.lambdas.push_back(lambda);
            pair.attractor_x.push_back(att.x);
            pair.repeller_x.push_back(rpl.x);
        }
        if (built) {
            auto diag = saddle_node_test(h, pair, lambda0, box, opts.newton);
            rep.scaling_exponent = diag.gap_exponent;
            rep.c2_pass = diag.pass && fold_found &&
                          std::abs(rep.lambda0_estimate - lambda0) < 1e-3;
            if (!diag.pass) detail << "saddle-node test: " << diag.failure;
        } else {
            rep.c2_pass = false;
        }
    }

    rep.pass = rep.c1_pass && rep.c2_pass && rep.c3_pass;
    rep.detail = detail.str();
    return rep;
}

VerificationReport verify_C1_C2_C3(const SynthesizedFamily& fam,
                                   const VerifyOptions& opts) {
    FieldFn h = [&fam](const Vec& x, double lambda) {
        return fam.eval(x, lambda, 1.0);
    };
    return verify_C1_C2_C3(h, fam.block_box, fam.unstable_dim, fam.whitney.lambda0,
                           opts);
}

}  // namespace foldcert
