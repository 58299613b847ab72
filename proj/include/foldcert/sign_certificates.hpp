#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "foldcert/samples.hpp"

namespace foldcert {

enum class Sign { Positive, Negative, Undetermined };

std::string to_string(Sign s);

// A codimension-one region of (x, lambda) space: one axis pinned to a
// coordinate (phase axis index in [0, n), or n for the lambda axis), the
// remaining axes ranging over intervals.  Degenerate ranges are allowed, so
// a single point (the interior witness) is just a face with every axis pinned.
struct FaceRegion {
    int phase_dim = 0;
    int pinned_axis = 0;       // 0..n-1 phase, n = lambda
    double pinned_value = 0.0;
    Box phase_ranges;          // n intervals; entry [pinned_axis] ignored when phase axis pinned
    Interval lambda_range{0.0, 1.0};

    bool contains(const Vec& x, double lambda, double tol) const;
    std::string describe() const;
};

// Which scalar the certificate bounds.
struct FaceQuantity {
    enum class Kind { Component, Directional } kind = Kind::Directional;
    int component = 0;  // Kind::Component
    Vec direction;      // Kind::Directional: f . direction (unit vector)

    double apply(const Vec& f) const;
    std::string describe() const;

    static FaceQuantity component_of(int idx);
    static FaceQuantity along(const Vec& dir);
};

struct SignCertificate {
    std::string face;    // face identifier (description string)
    std::string quantity;
    Sign sign = Sign::Undetermined;
    double margin = -std::numeric_limits<double>::infinity();
    int sample_count = 0;
    double covering_radius = 0.0;

    bool determinate() const { return sign != Sign::Undetermined; }
};

// Worst-case distance from any point of the face to its nearest sample,
// estimated on a probe mesh (probes per non-degenerate axis).
double covering_radius(const SampledVectorField& svf, const FaceRegion& face,
                       int probes_per_axis = 33, double on_face_tol = 1e-9);

// Lipschitz sign certification: if all sampled values of the quantity share
// a strict sign s and min|q| - L*h > 0, the sign holds on the whole face
// with that margin; otherwise Undetermined (margin -inf when sampled signs
// disagree).
SignCertificate certify_face_sign(const SampledVectorField& svf, const FaceRegion& face,
                                  const FaceQuantity& quantity, double spacing,
                                  double on_face_tol = 1e-9);

// Candidate block for the assumption check: a phase-space box, the interior
// witness point (sampled at lambda=0), the axis the witness direction and
// eventual split run along, and the direction whose sign empties the
// terminal slice.
struct BlockSpec {
    Box box;
    Vec interior_point;       // the nonvanishing-field witness location
    int split_axis = 0;
    std::optional<Vec> terminal_direction;  // default: split axis unit vector

    void validate(int dim) const;
};

struct AssumptionReport {
    struct Entry {
        std::string name;
        SignCertificate cert;
        bool present = true;  // false when the required sample is absent
    };
    std::vector<Entry> entries;
    bool certified = false;
    std::string first_failure;
};

// Block sign assumptions: determinate f.n on every phase-boundary face for
// all lambda, a determinate directional sign over the terminal slice, and a
// certified nonvanishing witness at (interior_point, 0).  `spacing` <= 0
// means: estimate the covering radius per face from the samples.
AssumptionReport check_block_assumptions(const SampledVectorField& svf,
                                         const BlockSpec& block, double spacing);

}  // namespace foldcert
