#pragma once

#include <functional>
#include <string>
#include <vector>

#include "foldcert/geometry.hpp"
#include "foldcert/samples.hpp"

namespace foldcert {

// Evaluable reference vector field f(x, lambda).  Closed-form models are
// registered by name so a synthesized family can be re-evaluated
// bit-reproducibly from its artifact file.
struct Field {
    int dim = 0;
    std::string name;
    std::vector<double> params;
    std::function<Vec(const Vec&, double)> eval;

    Vec operator()(const Vec& x, double lambda) const { return eval(x, lambda); }
};

// Registry: fold1d(lambda_star), fold2d(lambda_star, contraction),
// pitchfork1d(lambda_star), transcritical1d(lambda_star), linear1d(),
// decay(dim).  Throws ConfigInvalid for unknown names.
Field make_field(const std::string& name, const std::vector<double>& params);

// Max |field(x_i,l_i) - f_i| over the samples; the reference field must
// reproduce the data it stands in for.
double max_sample_deviation(const Field& field, const SampledVectorField& svf);

// Sampling helper used by the data generator and tests: block faces over a
// lambda sweep, the terminal slice, the interior witness at lambda = 0, and
// the split hyperplane through the witness at lambda = 0.
SampledVectorField sample_block_data(const Field& field, const Box& box,
                                     double lipschitz_bound, int face_points_per_axis,
                                     int face_lambda_points, int slice_points_per_axis,
                                     const Vec& witness_point, int split_axis = 0);

}  // namespace foldcert
