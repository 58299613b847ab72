#pragma once

#include "foldcert/geometry.hpp"

namespace foldcert {

// C-infinity ramp: exactly 0 for t <= 0, exactly 1 for t >= 1, all
// derivatives vanish at both ends.
double smooth_step(double t);

// Cutoff that is exactly 1 on `inner`, exactly 0 outside `outer`, smooth in
// between.  Axes where inner touches outer carry no transition on that side.
struct BoxCutoff {
    Box inner;
    Box outer;

    void validate() const;
    double value(const Vec& x) const;
    bool inside_outer(const Vec& x) const { return outer.contains(x); }
};

// One-dimensional cutoff on the parameter axis: 1 on the plateau side,
// 0 beyond the support edge.
struct LambdaCutoff {
    double plateau_end = 0.0;  // value is exactly 1 between anchor and here
    double support_end = 0.0;  // value is exactly 0 past here
    bool at_zero = true;       // plateau anchored at lambda=0 (else at lambda=1)

    void validate() const;
    double value(double lambda) const;
    Interval support() const;
};

bool supports_overlap(const LambdaCutoff& a, const LambdaCutoff& b);

}  // namespace foldcert
