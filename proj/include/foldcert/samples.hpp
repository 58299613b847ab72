#pragma once

#include <string>
#include <vector>

#include "foldcert/geometry.hpp"

namespace foldcert {

// Finite set of vector-field observations over phase x [0,1], plus the
// Lipschitz bound (Euclidean, joint in (x, lambda)) assumed for the model
// class.  This is the only ground truth the pipeline sees.
struct SampledVectorField {
    int dim = 0;
    struct Sample {
        Vec x;
        double lambda = 0.0;
        Vec f;
    };
    std::vector<Sample> samples;
    double lipschitz_bound = 0.0;

    void validate() const;
};

// Text format: header `dim=<n> lipschitz=<L>`, then one line per sample
// `x_1 ... x_n ; lambda ; f_1 ... f_n`.
SampledVectorField parse_samples(const std::string& text);
std::string serialize_samples(const SampledVectorField& svf);

SampledVectorField load_samples(const std::string& path);
void save_samples(const SampledVectorField& svf, const std::string& path);

}  // namespace foldcert
