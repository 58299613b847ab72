#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "foldcert/errors.hpp"

namespace foldcert {

using Vec = Eigen::VectorXd;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    bool degenerate(double tol = 0.0) const { return width() <= tol; }
};

// Axis-aligned box; axes may include the parameter axis as the last entry.
struct Box {
    std::vector<Interval> iv;

    Box() = default;
    explicit Box(std::vector<Interval> intervals) : iv(std::move(intervals)) {}

    int dim() const { return static_cast<int>(iv.size()); }

    bool contains(const Vec& x, double tol = 0.0) const {
        if (x.size() != dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (!iv[i].contains(x[i], tol)) return false;
        return true;
    }

    Vec center() const {
        Vec c(dim());
        for (int i = 0; i < dim(); ++i) c[i] = iv[i].mid();
        return c;
    }

    double diameter() const {
        double s = 0.0;
        for (const auto& I : iv) s += I.width() * I.width();
        return std::sqrt(s);
    }

    // Shrink every axis by `fraction` of its half-width (0 keeps the box).
    Box shrunk(double fraction) const {
        Box b = *this;
        for (auto& I : b.iv) {
            double d = 0.5 * I.width() * fraction;
            I.lo += d;
            I.hi -= d;
        }
        return b;
    }
};

// Discretization of phase-box x [0,1]: `resolution[i]` cells on phase axis i,
// `lambda_resolution` cells on the parameter axis.
struct Grid {
    Box phase_box;
    std::vector<int> resolution;
    int lambda_resolution = 1;

    int phase_dim() const { return phase_box.dim(); }

    void validate() const {
        if (static_cast<int>(resolution.size()) != phase_dim())
            throw ConfigInvalid("grid resolution list does not match phase dimension");
        for (int r : resolution)
            if (r < 1) throw ConfigInvalid("grid resolution must be positive");
        if (lambda_resolution < 1) throw ConfigInvalid("lambda resolution must be positive");
    }

    double phase_step(int axis) const {
        return phase_box.iv[axis].width() / resolution[axis];
    }
    double lambda_step() const { return 1.0 / lambda_resolution; }

    double node_coord(int axis, int index) const {
        return phase_box.iv[axis].lo + index * phase_step(axis);
    }
    double lambda_node(int index) const { return index * lambda_step(); }

    // Largest cell diagonal over (x, lambda).
    double cell_diameter() const {
        double s = lambda_step() * lambda_step();
        for (int i = 0; i < phase_dim(); ++i) s += phase_step(i) * phase_step(i);
        return std::sqrt(s);
    }
};

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace foldcert
