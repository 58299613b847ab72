#pragma once

#include <complex>
#include <optional>

#include "foldcert/lyapunov.hpp"
#include "foldcert/synthesis.hpp"

namespace foldcert {

struct Trajectory {
    std::vector<Vec> points;  // at multiples of `step`
    double step = 0.0;
    bool exited = false;      // left the given box before the horizon
    double exit_time = -1.0;
};

// Fixed-step 4th-order integration; halts early (flagged) when the state
// leaves `box`.  Throws NonFiniteValue on blow-up.
Trajectory integrate(const FieldFn& field, const Vec& x0, double lambda, double T,
                     double step, const Box& box);

struct Equilibrium {
    Vec x;
    double residual = 0.0;
    Eigen::MatrixXd jacobian;
    std::vector<std::complex<double>> eigenvalues;

    int unstable_dimension(double tol = 1e-9) const;
    bool hyperbolic(double tol = 1e-6) const;
    double smallest_eigen_magnitude() const;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 60;
    double fd_step = 1e-6;  // jacobian step scale: fd_step * (1 + |x|)
    double dedupe_tol = 1e-7;
};

Eigen::MatrixXd fd_jacobian(const FieldFn& field, const Vec& x, double lambda,
                            double fd_step);

// Deduplicated Newton roots inside the box, seeded from the given points.
std::vector<Equilibrium> find_equilibria(const FieldFn& field, double lambda,
                                         const Box& box, const std::vector<Vec>& seeds,
                                         const NewtonOptions& opts = {});

std::vector<Vec> grid_seeds(const Box& box, int per_axis);

struct BranchPoint {
    double lambda = 0.0;
    Vec x;
    double residual = 0.0;
    std::vector<std::complex<double>> eigenvalues;
    enum class Stability { Attracting, Saddle, Degenerate } stability =
        Stability::Attracting;
    int unstable_dim = 0;
    double smallest_singular_value = 0.0;
};

struct EquilibriumBranch {
    std::vector<BranchPoint> points;
    bool fold_detected = false;
    double fold_lambda = 0.0;
};

struct ContinuationOptions {
    double initial_step = 0.02;  // pseudo-arclength step
    double min_step = 1e-7;
    double max_step = 0.05;
    double fold_tol = 1e-6;      // smallest singular value at the fold
    double lambda_bisect_tol = 1e-6;
    int max_points = 4000;
    NewtonOptions newton;
};

// Pseudo-arclength continuation of an equilibrium branch from a converged
// seed across `lambda_range`; flags the fold via the smallest singular value
// of the state Jacobian with step-halving refinement in lambda.
EquilibriumBranch continue_branch(const FieldFn& field, const Interval& lambda_range,
                                  const Vec& seed, double seed_lambda,
                                  const ContinuationOptions& opts = {});

struct SaddleNodeDiagnostics {
    bool pass = false;
    double gap_exponent = 0.0;
    double eigenvalue_at_fold = 0.0;
    double other_eigen_min = 0.0;
    double quadratic_coefficient = 0.0;
    std::string failure;
};

struct BranchPair {
    std::vector<double> lambdas;   // below the fold
    std::vector<Vec> attractor_x;
    std::vector<Vec> repeller_x;
};

// Saddle-node signature at lambda0: (a) exactly one eigenvalue goes to zero
// while the rest stay bounded away, (b) the equilibrium gap fits
// C (lambda0-lambda)^e with e in [0.45, 0.55] over two decades, (c) the
// second derivative along the null eigenvector is bounded away from zero.
SaddleNodeDiagnostics saddle_node_test(const FieldFn& field, const BranchPair& pair,
                                       double lambda0, const Box& box,
                                       const NewtonOptions& opts = {});

enum class HeteroclinicResult { Pass, Fail, Inconclusive };

// Trajectories seeded at +-offset along the repeller's unstable eigenvector
// must either converge to the attractor or exit the block, with exactly one
// connecting side.
HeteroclinicResult heteroclinic_check(const FieldFn& field, double lambda,
                                      const Equilibrium& repeller,
                                      const Equilibrium& attractor, double offset,
                                      const Box& box, double horizon = 1e3,
                                      double step = 1e-3);

struct OmegaEstimate {
    bool escaped = false;
    Box bounding_box;
};

OmegaEstimate estimate_omega_limit(const FieldFn& field, const Vec& x0, double lambda,
                                   double horizon, double step, const Box& box);

struct VerificationReport {
    struct Census {
        double lambda = 0.0;
        int count = 0;
        std::vector<int> unstable_dims;
        bool hyperbolic = true;
        HeteroclinicResult heteroclinic = HeteroclinicResult::Inconclusive;
        bool orbits_exit = false;  // lambda > lambda0 probes
    };
    std::vector<Census> census;
    double lambda0_estimate = 0.0;
    double scaling_exponent = 0.0;
    bool c1_pass = false;
    bool c2_pass = false;
    bool c3_pass = false;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    int lambda_mesh = 21;
    int seeds_per_axis = 9;
    double mesh_margin = 0.05;  // skip a band of this width around lambda0
    NewtonOptions newton;
    ContinuationOptions continuation;
};

// C1: below lambda0 exactly two hyperbolic equilibria of unstable dimensions
// k-1, k with a heteroclinic connection; C2: saddle-node signature at
// lambda0; C3: above lambda0, empty census and all probe orbits exit.
VerificationReport verify_C1_C2_C3(const FieldFn& h, const Box& block_box,
                                   int unstable_dim, double lambda0,
                                   const VerifyOptions& opts = {});

// Convenience overload for the synthesized family's sigma = 1 slice.
VerificationReport verify_C1_C2_C3(const SynthesizedFamily& fam,
                                   const VerifyOptions& opts = {});

}  // namespace foldcert
