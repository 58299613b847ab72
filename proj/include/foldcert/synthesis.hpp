#pragma once

#include <memory>

#include "foldcert/cerf.hpp"
#include "foldcert/conley.hpp"
#include "foldcert/field.hpp"
#include "foldcert/lyapunov.hpp"

namespace foldcert {

// One-parameter endpoint family: blend of the frozen reference field toward
// the negative gradient of an explicit target function, supported inside the
// endpoint block.  f(x, 0) is the reference field bitwise; f(x, s) equals the
// reference field outside the cutoff support for every s.
struct EndpointFamily {
    std::function<Vec(const Vec&)> base;  // reference field frozen at the endpoint
    BoxCutoff cutoff;                     // phase-space support of the correction
    std::function<Vec(const Vec&)> target_gradient;  // grad of g0 / g1

    Vec eval(const Vec& x, double sigma) const;
};

struct SynthesisOptions {
    double lambda0 = 0.5;          // death placement, in (0,1)
    double inner_fraction = 0.20;  // B' = B shrunk by this fraction per axis
    double collar_fraction = 0.05; // cutoff outer box = B shrunk by this
    double eta_support = 0.25;     // eta = 1 near 0, 0 past this
    double eta_plateau = 0.10;
    double xi_support = 0.75;      // xi = 0 before this, 1 near 1
    double xi_plateau = 0.90;
    double amplitude = 0.0;        // 0: use the median sampled |f|
    double stage_match_tol = 1e-12;
    int graphic_mesh = 65;
    LyapunovOptions lyapunov;
};

// The synthesized two-parameter family F(x, lambda, sigma): stage fields
// F1 (endpoint normalization), F2 (Lyapunov domination), F3 (canonical
// single-death gradient model inside B'), composed on a smooth 3-piece
// sigma schedule.
struct SynthesizedFamily {
    Field base;                 // named reference field (serializable)
    SampledVectorField data;    // the observations the family must respect
    BlockPair pair;
    int unstable_dim = 1;

    Box block_box;              // B (phase space)
    Box inner_box;              // B'
    BoxCutoff rho;              // 1 on B', 0 outside the collar-shrunk B
    BoxCutoff rho0, rho1;       // endpoint supports (lambda = 0 / 1)
    LambdaCutoff eta, xi;
    LyapunovFunction lyapunov;
    WhitneyModel whitney;
    double amplitude = 1.0;     // value scale of the canonical model
    double f1_scale = 1.0;      // gradient magnitude of the terminal endpoint g1
    Vec terminal_direction;     // drives the critical-point-free endpoint g1
    CerfGraphic graphic;        // single cubic death at lambda0
    int graphic_mesh = 65;
    EndpointFamily f0, f1;

    // stage fields
    Vec eval_F1(const Vec& x, double lambda, double sigma) const;
    Vec eval_F1_end(const Vec& x, double lambda) const;
    Vec eval_F2(const Vec& x, double lambda, double sigma) const;
    Vec eval_F2_end(const Vec& x, double lambda) const;
    Vec eval_F3(const Vec& x, double lambda, double sigma) const;

    // final composed family (smooth sigma reparameterization per stage)
    Vec eval(const Vec& x, double lambda, double sigma) const;

    // canonical-model gradient, amplitude-scaled; zero outside the chart
    Vec model_gradient(const Vec& x, double lambda) const;
};

// The two endpoint families of the synthesis: f0 deforms the lambda=0 field
// to -grad g0 where g0 has exactly two nondegenerate critical points of
// indices k-1 and k with distinct values and a connecting gradient segment;
// f1 deforms the lambda=1 field to -grad g1 with g1 critical-point-free.
std::pair<EndpointFamily, EndpointFamily> endpoint_families(
    const Field& base, const SynthesizedFamily& geometry);

// R(x,lambda,sigma) = rho [(1-sigma) f - sigma grad g] + (1-rho) f, computed
// as f - (rho sigma)(f + grad g) so the sigma=0 slice and the region outside
// the cutoff support reproduce f exactly.
Vec blend(const FieldFn& f, const LyapunovFunction& g, const BoxCutoff& rho,
          const Vec& x, double lambda, double sigma);

// Full synthesis pipeline for a certified block pair.
SynthesizedFamily synthesize_family(const Field& base, const SampledVectorField& data,
                                    const BlockPair& pair, int unstable_dim,
                                    const SynthesisOptions& opts = {});

// Invariant checks run after composition (all exact): F(.,.,0)=f at every
// sample, F=f for samples outside Int(B) at every sigma of an 11-point mesh,
// and stage junction deviations are zero.
struct SynthesisChecks {
    double sigma0_deviation = 0.0;
    double outside_deviation = 0.0;
    double junction_deviation = 0.0;
    double boundary_sign_worst_margin = 0.0;  // certified face signs under F
    int outside_sample_count = 0;
};
SynthesisChecks check_family(const SynthesizedFamily& fam);

// Plain-text model file, sufficient for bit-identical re-evaluation.
std::string serialize_family(const SynthesizedFamily& fam);
SynthesizedFamily parse_family(const std::string& text);

}  // namespace foldcert
