#include "foldcert/field.hpp"

#include <cmath>
#include <set>

namespace foldcert {

namespace {

double param_or(const std::vector<double>& p, size_t i, double dflt) {
    return i < p.size() ? p[i] : dflt;
}

}  // namespace

Field make_field(const std::string& name, const std::vector<double>& params) {
    Field f;
    f.name = name;
    f.params = params;
    if (name == "fold1d") {
        double ls = param_or(params, 0, 0.5);
        f.dim = 1;
        f.params = {ls};
        f.eval = [ls](const Vec& x, double lambda) {
            Vec v(1);
            v[0] = (ls - lambda) - x[0] * x[0];
            return v;
        };
    } else if (name == "fold2d") {
        double ls = param_or(params, 0, 0.5);
        double c = param_or(params, 1, 1.0);
        f.dim = 2;
        f.params = {ls, c};
        f.eval = [ls, c](const Vec& x, double lambda) {
            Vec v(2);
            v[0] = (ls - lambda) - x[0] * x[0];
            v[1] = -c * x[1];
            return v;
        };
    } else if (name == "pitchfork1d") {
        double ls = param_or(params, 0, 0.5);
        f.dim = 1;
        f.params = {ls};
        f.eval = [ls](const Vec& x, double lambda) {
            Vec v(1);
            double mu = ls - lambda;
            v[0] = mu * x[0] - x[0] * x[0] * x[0];
            return v;
        };
    } else if (name == "transcritical1d") {
        double ls = param_or(params, 0, 0.5);
        f.dim = 1;
        f.params = {ls};
        f.eval = [ls](const Vec& x, double lambda) {
            Vec v(1);
            double mu = ls - lambda;
            v[0] = mu * x[0] - x[0] * x[0];
            return v;
        };
    } else if (name == "linear1d") {
        f.dim = 1;
        f.params = {};
        f.eval = [](const Vec& x, double lambda) {
            Vec v(1);
            v[0] = -x[0] + lambda;
            return v;
        };
    } else if (name == "decay") {
        int dim = static_cast<int>(param_or(params, 0, 1));
        f.dim = dim;
        f.params = {static_cast<double>(dim)};
        f.eval = [](const Vec& x, double) { return Vec(-x); };
    } else {
        throw ConfigInvalid("unknown field model: " + name);
    }
    return f;
}

double max_sample_deviation(const Field& field, const SampledVectorField& svf) {
    double worst = 0.0;
    for (const auto& s : svf.samples) {
        Vec v = field(s.x, s.lambda);
        worst = std::max(worst, (v - s.f).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

namespace {

void enumerate_box(const Box& box, const std::vector<int>& counts,
                   const std::function<void(const Vec&)>& visit) {
    int n = box.dim();
    std::vector<int> idx(n, 0);
    Vec x(n);
    while (true) {
        for (int i = 0; i < n; ++i) {
            const auto& I = box.iv[i];
            x[i] = counts[i] <= 1 ? I.mid()
                                  : I.lo + I.width() * idx[i] / (counts[i] - 1);
        }
        visit(x);
        int c = 0;
        while (c < n) {
            if (++idx[c] < std::max(counts[c], 1)) break;
            idx[c] = 0;
            ++c;
        }
        if (c == n) break;
    }
}

}  // namespace

SampledVectorField sample_block_data(const Field& field, const Box& box,
                                     double lipschitz_bound, int face_points_per_axis,
                                     int face_lambda_points, int slice_points_per_axis,
                                     const Vec& witness_point, int split_axis) {
    int n = field.dim;
    SampledVectorField svf;
    svf.dim = n;
    svf.lipschitz_bound = lipschitz_bound;

    std::set<std::pair<std::vector<double>, double>> seen;
    auto push = [&](const Vec& x, double lambda) {
        std::vector<double> key(x.data(), x.data() + x.size());
        if (!seen.insert({key, lambda}).second) return;
        SampledVectorField::Sample s;
        s.x = x;
        s.lambda = lambda;
        s.f = field(x, lambda);
        svf.samples.push_back(std::move(s));
    };

    // phase-boundary faces swept over lambda
    for (int axis = 0; axis < n; ++axis) {
        for (int side : {0, 1}) {
            Box face = box;
            double v = side ? box.iv[axis].hi : box.iv[axis].lo;
            face.iv[axis] = {v, v};
            std::vector<int> counts(n, face_points_per_axis);
            counts[axis] = 1;
            for (int li = 0; li < face_lambda_points; ++li) {
                double lambda = face_lambda_points <= 1
                                    ? 0.0
                                    : static_cast<double>(li) / (face_lambda_points - 1);
                enumerate_box(face, counts, [&](const Vec& x) { push(x, lambda); });
            }
        }
    }

    // terminal slice lambda = 1
    {
        std::vector<int> counts(n, slice_points_per_axis);
        enumerate_box(box, counts, [&](const Vec& x) { push(x, 1.0); });
    }

    // interior witness at lambda = 0
    push(witness_point, 0.0);

    // split hyperplane through the witness at lambda = 0 (the interface the
    // attractor/repeller split certifies against)
    if (n > 1) {
        Box plane = box;
        plane.iv[split_axis] = {witness_point[split_axis], witness_point[split_axis]};
        std::vector<int> counts(n, slice_points_per_axis);
        counts[split_axis] = 1;
        enumerate_box(plane, counts, [&](const Vec& x) { push(x, 0.0); });
    }

    svf.validate();
    return svf;
}

}  // namespace foldcert
