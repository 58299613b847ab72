#include "foldcert/cutoff.hpp"

#include <cmath>

namespace foldcert {

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

void BoxCutoff::validate() const {
    if (inner.dim() != outer.dim())
        throw ConfigInvalid("cutoff inner/outer dimension mismatch");
    for (int i = 0; i < inner.dim(); ++i) {
        if (inner.iv[i].lo < outer.iv[i].lo || inner.iv[i].hi > outer.iv[i].hi)
            throw ConfigInvalid("cutoff inner region must sit inside the outer region");
        if (inner.iv[i].width() < 0.0)
            throw ConfigInvalid("cutoff inner region has negative width");
    }
}

double BoxCutoff::value(const Vec& x) const {
    double v = 1.0;
    for (int i = 0; i < inner.dim(); ++i) {
        double xi = x[i];
        const Interval& in = inner.iv[i];
        const Interval& out = outer.iv[i];
        if (xi < in.lo) {
            if (out.lo >= in.lo) return 0.0;  // no collar: hard edge
            v *= smooth_step((xi - out.lo) / (in.lo - out.lo));
        } else if (xi > in.hi) {
            if (out.hi <= in.hi) return 0.0;
            v *= 1.0 - smooth_step((xi - in.hi) / (out.hi - in.hi));
        }
        if (v == 0.0) return 0.0;
    }
    return v;
}

void LambdaCutoff::validate() const {
    if (at_zero) {
        if (!(0.0 <= plateau_end && plateau_end < support_end && support_end <= 1.0))
            throw ConfigInvalid("lambda cutoff at 0 needs 0 <= plateau < support <= 1");
    } else {
        if (!(0.0 <= support_end && support_end < plateau_end && plateau_end <= 1.0))
            throw ConfigInvalid("lambda cutoff at 1 needs 0 <= support < plateau <= 1");
    }
}

double LambdaCutoff::value(double lambda) const {
    if (at_zero) {
        if (lambda <= plateau_end) return 1.0;
        if (lambda >= support_end) return 0.0;
        return 1.0 - smooth_step((lambda - plateau_end) / (support_end - plateau_end));
    }
    if (lambda >= plateau_end) return 1.0;
    if (lambda <= support_end) return 0.0;
    return smooth_step((lambda - support_end) / (plateau_end - support_end));
}

Interval LambdaCutoff::support() const {
    return at_zero ? Interval{0.0, support_end} : Interval{support_end, 1.0};
}

bool supports_overlap(const LambdaCutoff& a, const LambdaCutoff& b) {
    Interval sa = a.support(), sb = b.support();
    return sa.lo < sb.hi && sb.lo < sa.hi;
}

}  // namespace foldcert
