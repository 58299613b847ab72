#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "foldcert/verify.hpp"

namespace foldcert {

namespace {

Vec field_lambda_derivative(const FieldFn& f, const Vec& x, double lambda, double h) {
    double lp = std::min(1.0, lambda + h);
    double lm = std::max(0.0, lambda - h);
    return (f(x, lp) - f(x, lm)) / (lp - lm);
}

struct AugSystem {
    Eigen::MatrixXd J;   // n x n state jacobian
    Vec f_lambda;        // n
};

AugSystem augmented(const FieldFn& f, const Vec& x, double lambda, double fd_step) {
    AugSystem s;
    s.J = fd_jacobian(f, x, lambda, fd_step);
    s.f_lambda = field_lambda_derivative(f, x, lambda, fd_step * (1.0 + std::abs(lambda)));
    return s;
}

// tangent of the branch: [J | f_lambda] t = 0, normalized, oriented along prev
Eigen::VectorXd branch_tangent(const AugSystem& s, const Eigen::VectorXd& prev) {
    int n = static_cast<int>(s.J.rows());
    Eigen::MatrixXd A(n + 1, n + 1);
    A.topLeftCorner(n, n) = s.J;
    A.topRightCorner(n, 1) = s.f_lambda;
    A.bottomRows(1) = prev.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs[n] = 1.0;
    Eigen::VectorXd t = A.fullPivLu().solve(rhs);
    double nt = t.norm();
    if (!(nt > 1e-14) || !t.allFinite()) throw LostBranch("degenerate branch tangent");
    t /= nt;
    if (t.dot(prev) < 0.0) t = -t;
    return t;
}

bool corrector(const FieldFn& f, Eigen::VectorXd& u, const Eigen::VectorXd& t,
               const Eigen::VectorXd& u_pred, const NewtonOptions& opts) {
    int n = static_cast<int>(u.size()) - 1;
    for (int it = 0; it < opts.max_iter; ++it) {
        Vec x = u.head(n);
        double lambda = u[n];
        Vec fx = f(x, lambda);
        double constraint = t.dot(u - u_pred);
        double res = std::sqrt(fx.squaredNorm() + constraint * constraint);
        if (!std::isfinite(res)) return false;
        if (res < opts.tol) return true;
        AugSystem s = augmented(f, x, lambda, opts.fd_step);
        Eigen::MatrixXd A(n + 1, n + 1);
        A.topLeftCorner(n, n) = s.J;
        A.topRightCorner(n, 1) = s.f_lambda;
        A.bottomRows(1) = t.transpose();
        Eigen::VectorXd rhs(n + 1);
        rhs.head(n) = -fx;
        rhs[n] = -constraint;
        Eigen::VectorXd du = A.fullPivLu().solve(rhs);
        if (!du.allFinite()) return false;
        u += du;
    }
    return false;
}

BranchPoint make_point(const FieldFn& f, const Vec& x, double lambda,
                       const NewtonOptions& opts, double fold_tol) {
    BranchPoint p;
    p.lambda = lambda;
    p.x = x;
    p.residual = f(x, lambda).norm();
    Eigen::MatrixXd J = fd_jacobian(f, x, lambda, opts.fd_step);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    for (int i = 0; i < J.rows(); ++i) p.eigenvalues.push_back(es.eigenvalues()[i]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    p.smallest_singular_value = svd.singularValues().minCoeff();
    int unstable = 0;
    bool degenerate = p.smallest_singular_value < fold_tol;
    for (const auto& e : p.eigenvalues) {
        if (e.real() > 1e-9) ++unstable;
        if (std::abs(e.real()) < 1e-9) degenerate = true;
    }
    p.unstable_dim = unstable;
    p.stability = degenerate ? BranchPoint::Stability::Degenerate
                  : unstable == 0 ? BranchPoint::Stability::Attracting
                                  : BranchPoint::Stability::Saddle;
    return p;
}

}  // namespace

EquilibriumBranch continue_branch(const FieldFn& field, const Interval& lambda_range,
                                  const Vec& seed, double seed_lambda,
                                  const ContinuationOptions& opts) {
    int n = static_cast<int>(seed.size());
    Box huge;
    huge.iv.assign(n, {-1e12, 1e12});
    auto roots = find_equilibria(field, seed_lambda, huge, {seed}, opts.newton);
    if (roots.empty())
        throw LostBranch("seed did not converge to an equilibrium at lambda=" +
                         format_real(seed_lambda));
    Vec x = roots.front().x;

    EquilibriumBranch branch;
    branch.points.push_back(make_point(field, x, seed_lambda, opts.newton, opts.fold_tol));

    Eigen::VectorXd u(n + 1);
    u.head(n) = x;
    u[n] = seed_lambda;
    Eigen::VectorXd t0 = Eigen::VectorXd::Zero(n + 1);
    t0[n] = 1.0;  // sweep toward increasing lambda
    Eigen::VectorXd t;
    try {
        t = branch_tangent(augmented(field, x, seed_lambda, opts.newton.fd_step), t0);
    } catch (const LostBranch&) {
        // seeded exactly at a fold; report it
        branch.fold_detected = true;
        branch.fold_lambda = seed_lambda;
        return branch;
    }

    double h = opts.initial_step;
    int fails = 0;
    while (static_cast<int>(branch.points.size()) < opts.max_points) {
        Eigen::VectorXd u_pred = u + h * t;
        Eigen::VectorXd u_new = u_pred;
        if (!corrector(field, u_new, t, u_pred, opts.newton)) {
            h *= 0.5;
            if (++fails > 60 || h < opts.min_step)
                throw LostBranch("corrector failed at lambda=" + format_real(u[n]));
            continue;
        }
        fails = 0;
        Eigen::VectorXd t_new;
        try {
            t_new = branch_tangent(
                augmented(field, u_new.head(n), u_new[n], opts.newton.fd_step), t);
        } catch (const LostBranch&) {
            t_new = t;
        }

        bool fold_bracketed = t[n] > 0.0 && t_new[n] < 0.0;
        if (fold_bracketed && h > opts.min_step &&
            std::abs(u_new[n] - u[n]) > opts.lambda_bisect_tol) {
            // step-halving bisection in lambda onto the fold
            h *= 0.5;
            continue;
        }

        u = u_new;
        t = t_new;
        branch.points.push_back(
            make_point(field, u.head(n), u[n], opts.newton, opts.fold_tol));
        const BranchPoint& bp = branch.points.back();

        if (fold_bracketed || bp.smallest_singular_value < opts.fold_tol) {
            branch.fold_detected = true;
            branch.fold_lambda = u[n];
            break;
        }
        if (u[n] > lambda_range.hi + 1e-9 || u[n] < lambda_range.lo - 1e-9) break;
        h = std::min(h * 1.5, opts.max_step);
    }
    return branch;
}

}  // namespace foldcert
