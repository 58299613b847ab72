#pragma once

#include <functional>
#include <optional>

#include "foldcert/block.hpp"
#include "foldcert/cutoff.hpp"

namespace foldcert {

// Scalar field given by node values on a regular grid over `domain`,
// multilinearly interpolated; gradients are node-wise central differences,
// themselves interpolated multilinearly.
struct GridScalarField {
    Box domain;
    std::vector<int> res;          // cells per axis; nodes = res[i]+1
    std::vector<double> values;    // row-major over nodes
    std::vector<std::vector<double>> node_gradients;  // per axis

    int dim() const { return domain.dim(); }
    size_t node_count() const;
    size_t node_index(const std::vector<int>& idx) const;
    double step(int axis) const { return domain.iv[axis].width() / res[axis]; }

    void compute_gradients();
    double value(const Vec& p) const;
    Vec gradient(const Vec& p) const;
    void smooth(int passes, const std::vector<char>& pinned);
};

using FieldFn = std::function<Vec(const Vec&, double)>;

// Potential dominating the block interior (the canonical-model value
// function); g follows it where `weight` is 1 and the boundary harmonic
// where `weight` is 0.
struct CorePotential {
    std::function<double(const Vec&, double)> value;  // (x, lambda)
    BoxCutoff weight;
};

struct LyapunovOptions {
    int lambda_res = 32;
    int refine = 2;               // lyapunov nodes per block cell and axis
    int smoothing_passes = 0;     // optional stencil; face levels stay pinned
    double orbit_horizon = 1.0;   // escape-time threshold for the S-neighborhood
    double orbit_step = 0.01;
    int halo_cells = 2;           // inflate the S-neighborhood when sampling
    int samples_per_axis = 128;   // decrease-check mesh (phase axes)
    int lambda_samples = 49;
    std::optional<CorePotential> core;
};

// Lyapunov function for the block: discrete Laplace solution over
// (x, lambda) with +1 on entrance faces and -1 on exit faces; when a core
// potential is supplied its (normalized) values replace the harmonic inside
// the core weight's support.  The result is recentered so the estimated
// invariant-set neighborhood sits near level 0, and the decrease inequality
// <grad g, f> < 0 is verified a posteriori on the declared sample set.
struct LyapunovFunction {
    GridScalarField g;  // over (x_1..x_n, lambda)

    // estimated S-neighborhood: phase cell index (flattened) x lambda node
    std::vector<char> s_nbhd;
    std::vector<int> phase_cells;  // cells per phase axis
    int lambda_nodes = 0;

    Eigen::MatrixXd decrease_samples;  // rows: (x_1..x_n, lambda)
    double worst_margin = 0.0;         // min over samples of -<grad g, f>

    double value(const Vec& x, double lambda) const;
    Vec grad_x(const Vec& x, double lambda) const;
    // halo counts cells on the phase axes and nodes on the lambda axis
    bool in_s_neighborhood(const Vec& x, double lambda, int halo) const;
};

LyapunovFunction build_lyapunov(const IsolatingBlock& block, const BlockPair& pair,
                                const FieldFn& field, const LyapunovOptions& opts = {});

}  // namespace foldcert
