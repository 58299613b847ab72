#include "foldcert/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace foldcert {

Vec EndpointFamily::eval(const Vec& x, double sigma) const {
    Vec b = base(x);
    double w = cutoff.value(x) * sigma;
    if (w == 0.0) return b;
    return b - w * (b + target_gradient(x));
}

Vec blend(const FieldFn& f, const LyapunovFunction& g, const BoxCutoff& rho,
          const Vec& x, double lambda, double sigma) {
    Vec b = f(x, lambda);
    double w = rho.value(x) * sigma;
    if (w == 0.0) return b;
    return b - w * (b + g.grad_x(x, lambda));
}

Vec SynthesizedFamily::model_gradient(const Vec& x, double lambda) const {
    return amplitude * whitney_gradient(whitney, x, lambda);
}

Vec SynthesizedFamily::eval_F1(const Vec& x, double lambda, double sigma) const {
    Vec v = base(x, lambda);
    double e = eta.value(lambda);
    if (e != 0.0) v += e * (f0.eval(x, sigma) - base(x, 0.0));
    double c = xi.value(lambda);
    if (c != 0.0) v += c * (f1.eval(x, sigma) - base(x, 1.0));
    return v;
}

Vec SynthesizedFamily::eval_F1_end(const Vec& x, double lambda) const {
    return eval_F1(x, lambda, 1.0);
}

Vec SynthesizedFamily::eval_F2(const Vec& x, double lambda, double sigma) const {
    Vec b = eval_F1_end(x, lambda);
    double w = rho.value(x) * sigma;
    if (w == 0.0) return b;
    return b - w * (b + lyapunov.grad_x(x, lambda));
}

Vec SynthesizedFamily::eval_F2_end(const Vec& x, double lambda) const {
    return eval_F2(x, lambda, 1.0);
}

Vec SynthesizedFamily::eval_F3(const Vec& x, double lambda, double sigma) const {
    Vec b = eval_F2_end(x, lambda);
    double w = rho.value(x) * sigma;
    if (w == 0.0) return b;
    Vec target = -model_gradient(x, lambda);
    return b + w * (target - b);
}

Vec SynthesizedFamily::eval(const Vec& x, double lambda, double sigma) const {
    if (sigma < 0.0 || sigma > 1.0)
        throw ConfigInvalid("sigma must lie in [0,1]");
    double t = 3.0 * sigma;
    if (t < 1.0) return eval_F1(x, lambda, smooth_step(t));
    if (t < 2.0) return eval_F2(x, lambda, smooth_step(t - 1.0));
    return eval_F3(x, lambda, smooth_step(t - 2.0));
}

std::pair<EndpointFamily, EndpointFamily> endpoint_families(
    const Field& base, const SynthesizedFamily& geometry) {
    EndpointFamily f0, f1;
    const Field base_copy = base;

    f0.base = [base_copy](const Vec& x) { return base_copy(x, 0.0); };
    f0.cutoff = geometry.rho0;
    const WhitneyModel model = geometry.whitney;
    const double amp = geometry.amplitude;
    f0.target_gradient = [model, amp](const Vec& x) {
        return Vec(amp * whitney_gradient(model, x, 0.0));
    };

    f1.base = [base_copy](const Vec& x) { return base_copy(x, 1.0); };
    f1.cutoff = geometry.rho1;
    const Vec grad1 = geometry.f1_scale * geometry.terminal_direction;
    f1.target_gradient = [grad1](const Vec&) { return grad1; };
    return {f0, f1};
}

namespace {

double median_sample_norm(const SampledVectorField& data) {
    std::vector<double> norms;
    norms.reserve(data.samples.size());
    for (const auto& s : data.samples) norms.push_back(s.f.norm());
    if (norms.empty()) return 1.0;
    std::sort(norms.begin(), norms.end());
    double m = norms[norms.size() / 2];
    return m > 1e-8 ? m : 1.0;
}

// Plain Newton against the reference field, used to align the canonical
// chart with the lambda=0 equilibria.
std::optional<Vec> reference_root(const Field& f, Vec x, const Box& box) {
    int n = f.dim;
    for (int it = 0; it < 50; ++it) {
        Vec fx = f(x, 0.0);
        if (!fx.allFinite()) return std::nullopt;
        if (fx.norm() < 1e-11) return x;
        double h = 1e-6 * (1.0 + x.norm());
        Eigen::MatrixXd J(n, n);
        for (int j = 0; j < n; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (f(xp, 0.0) - f(xm, 0.0)) / (2.0 * h);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) return std::nullopt;
        x += lu.solve(-fx);
        if (!box.contains(x, box.diameter())) return std::nullopt;
    }
    return f(x, 0.0).norm() < 1e-9 ? std::optional<Vec>(x) : std::nullopt;
}

}  // namespace

SynthesizedFamily synthesize_family(const Field& base, const SampledVectorField& data,
                                    const BlockPair& pair, int unstable_dim,
                                    const SynthesisOptions& opts) {
    if (base.dim != data.dim)
        throw DimensionMismatch("reference field and data dimension differ");
    if (unstable_dim < 1 || unstable_dim > data.dim)
        throw ConfigInvalid("unstable dimension must lie in [1, n]");
    if (!(opts.lambda0 > 0.0 && opts.lambda0 < 1.0))
        throw ConfigInvalid("lambda0 must lie in (0,1)");
    double data_dev = max_sample_deviation(base, data);
    if (data_dev > 1e-9)
        throw ConfigInvalid("reference field deviates from the data samples by " +
                            format_real(data_dev));

    SynthesizedFamily fam;
    fam.base = base;
    fam.data = data;
    fam.pair = pair;
    fam.unstable_dim = unstable_dim;
    int n = data.dim;

    fam.block_box = pair.parent.region.bounding_box();
    fam.inner_box = fam.block_box.shrunk(opts.inner_fraction);
    Box outer_box = fam.block_box.shrunk(opts.collar_fraction);
    fam.rho.inner = fam.inner_box;
    fam.rho.outer = outer_box;
    fam.rho.validate();
    fam.rho0 = fam.rho1 = fam.rho;

    fam.eta = LambdaCutoff{opts.eta_plateau, opts.eta_support, true};
    fam.xi = LambdaCutoff{opts.xi_plateau, opts.xi_support, false};
    fam.eta.validate();
    fam.xi.validate();
    if (supports_overlap(fam.eta, fam.xi))
        throw OverlappingCutoffs("eta and xi supports intersect");

    // Canonical chart: z runs from the repeller half to the attractor half,
    // unit chart coordinates at the reference field's lambda=0 equilibria
    // (estimated by Newton from the sub-block centers; the centers stand in
    // when the estimate fails).  Alignment keeps the model potential a valid
    // descent function for the data field across the whole sweep.
    Box att_box = pair.attractor.region.bounding_box();
    Box rep_box = pair.repeller.region.bounding_box();
    int axis = pair.split_axis;
    Vec p_att = att_box.center();
    Vec p_rep = rep_box.center();
    {
        auto r_att = reference_root(base, p_att, att_box);
        auto r_rep = reference_root(base, p_rep, rep_box);
        if (r_att && r_rep && att_box.contains(*r_att, 1e-9) &&
            rep_box.contains(*r_rep, 1e-9))
            if (std::abs(((*r_att) - (*r_rep))[axis]) > 1e-9) {
                p_att = *r_att;
                p_rep = *r_rep;
            }
    }
    double c_att = p_att[axis];
    double c_rep = p_rep[axis];
    if (std::abs(c_att - c_rep) < 1e-12)
        throw ConfigInvalid("degenerate split: equilibrium estimates coincide");
    double s_z = 0.5 * std::abs(c_att - c_rep);
    double e_sign = c_att > c_rep ? 1.0 : -1.0;

    double lam0 = opts.lambda0;
    double z_scale = std::sqrt(lam0 / 3.0);
    double y_scale = std::pow(lam0 / 3.0, 0.75);

    WhitneyModel model;
    model.lambda0 = lam0;
    model.sign = +1;
    model.g0 = 0.0;
    model.q_plus = n - unstable_dim;
    model.q_minus = unstable_dim - 1;
    model.chart_center = 0.5 * (p_att + p_rep);
    model.chart_map = Eigen::MatrixXd::Zero(n, n);
    int row = 0;
    for (int i = 0; i < n; ++i) {
        if (i == axis) continue;
        double half = 0.5 * fam.block_box.iv[i].width();
        model.chart_map(row, i) = y_scale / half;
        ++row;
    }
    model.chart_map(n - 1, axis) = e_sign * z_scale / s_z;
    model.chart_domain = fam.block_box;
    model.validate();
    fam.whitney = model;

    double base_amplitude =
        opts.amplitude > 0.0 ? opts.amplitude : median_sample_norm(data);
    fam.amplitude = base_amplitude * std::pow(3.0 / lam0, 1.5);
    fam.f1_scale = base_amplitude / s_z;
    fam.graphic_mesh = opts.graphic_mesh;

    // Orient the terminal endpoint so its linear function decreases along
    // the lambda=1 flow.
    Vec u = Vec::Zero(n);
    u[axis] = 1.0;
    Vec probe = base(fam.block_box.center(), 1.0);
    if (probe.dot(u) > 0.0) u = -u;
    fam.terminal_direction = u;

    auto [f0, f1] = endpoint_families(base, fam);
    fam.f0 = f0;
    fam.f1 = f1;

    // Lyapunov function is built against the stage-1 endpoint field, with
    // the canonical potential dominating the block interior.
    const SynthesizedFamily* self = &fam;
    FieldFn f1_end = [self](const Vec& x, double lambda) {
        return self->eval_F1_end(x, lambda);
    };
    LyapunovOptions lopts = opts.lyapunov;
    {
        // The model potential carries the block: its cubic recrosses zero
        // only at |z_e| = sqrt(3), so on a block whose faces sit closer, an
        // outward steepening beyond the critical points restores the face
        // signs (g < 0 at the exit, > 0 at the entrance).  The steepening
        // gradient points along the through-flow everywhere, so it cannot
        // hurt the decrease margins.
        const WhitneyModel core_model = fam.whitney;
        const double core_amp = fam.amplitude;
        const double z_scale = std::sqrt(lam0 / 3.0);
        const double unit_scale = std::pow(lam0 / 3.0, 1.5);

        double kappa = 0.0;
        for (double face : {fam.block_box.iv[axis].lo, fam.block_box.iv[axis].hi}) {
            Vec probe = model.chart_center;
            probe[axis] = face;
            double ze = std::abs(model.to_chart(probe)[n - 1] / z_scale);
            double deficit = 3.0 * ze - ze * ze * ze;  // worst case, at lambda = 0
            if (deficit <= 0.0) continue;              // face already past the zero
            double reach = ze - 1.0;
            if (reach < 0.05)
                throw ConfigInvalid(
                    "block is too tight around the critical zone for a "
                    "sign-correct potential (face at |z_e| = " +
                    format_real(ze) + ")");
            kappa = std::max(kappa, 2.0 * deficit / (reach * reach * reach));
        }

        CorePotential core;
        core.value = [core_model, core_amp, z_scale, unit_scale, kappa](
                         const Vec& x, double lambda) {
            double v = whitney_value(core_model, x, lambda);
            int nn = core_model.phase_dim();
            double ze = core_model.to_chart(x)[nn - 1] / z_scale;
            double over = std::abs(ze) - 1.0;
            if (over > 0.0)
                v += (ze > 0.0 ? 1.0 : -1.0) * kappa * unit_scale * over * over * over;
            return core_amp * v;
        };
        core.weight.inner = fam.block_box;
        core.weight.outer = fam.block_box;
        lopts.core = core;
    }
    fam.lyapunov = build_lyapunov(pair.parent, pair, f1_end, lopts);

    fam.graphic = single_death_graphic(model, fam.amplitude, unstable_dim,
                                       opts.graphic_mesh);

    // Stage-boundary agreement, asserted on a probe grid.
    SynthesisChecks checks = check_family(fam);
    if (checks.junction_deviation > opts.stage_match_tol)
        throw StageMismatch("stage junction deviation " +
                            format_real(checks.junction_deviation));
    return fam;
}

SynthesisChecks check_family(const SynthesizedFamily& fam) {
    SynthesisChecks out;
    int n = fam.data.dim;

    // The installed graphic must be the single death of the whitney model
    // with the certified index pair on its arcs.
    {
        const CerfGraphic& g = fam.graphic;
        bool shape = g.events.size() == 1 &&
                     g.events[0].kind == EventKind::CubicDeath &&
                     std::abs(g.events[0].lambda - fam.whitney.lambda0) < 1e-12 &&
                     g.arcs.size() == 2;
        if (shape) {
            std::vector<int> idx = {g.arcs[0].morse_index, g.arcs[1].morse_index};
            std::sort(idx.begin(), idx.end());
            shape = idx ==
                    std::vector<int>{fam.unstable_dim - 1, fam.unstable_dim};
        }
        if (!shape)
            throw InconsistentGraphic(
                "graphic does not realize the model's single death with the "
                "certified index pair");
    }

    // F(., ., 0) must reproduce every data sample.
    for (const auto& s : fam.data.samples) {
        Vec v = fam.eval(s.x, s.lambda, 0.0);
        out.sigma0_deviation =
            std::max(out.sigma0_deviation, (v - s.f).lpNorm<Eigen::Infinity>());
    }

    // Outside Int(B), F must equal the data for every sigma.
    auto strictly_inside = [&](const Vec& x) {
        for (int i = 0; i < n; ++i)
            if (!(x[i] > fam.block_box.iv[i].lo && x[i] < fam.block_box.iv[i].hi))
                return false;
        return true;
    };
    for (const auto& s : fam.data.samples) {
        if (strictly_inside(s.x)) continue;
        ++out.outside_sample_count;
        for (int m = 0; m <= 10; ++m) {
            double sigma = m / 10.0;
            Vec v = fam.eval(s.x, s.lambda, sigma);
            out.outside_deviation =
                std::max(out.outside_deviation, (v - s.f).lpNorm<Eigen::Infinity>());
        }
    }

    // Stage junctions share the evaluable objects; deviation must be zero.
    for (int ix = 0; ix <= 4; ++ix) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            const auto& I = fam.block_box.iv[i];
            x[i] = I.lo + I.width() * (0.1 + 0.2 * ix);
        }
        for (int il = 0; il <= 4; ++il) {
            double lambda = il / 4.0;
            Vec a = fam.eval_F1(x, lambda, 1.0) - fam.eval_F2(x, lambda, 0.0);
            Vec b = fam.eval_F2(x, lambda, 1.0) - fam.eval_F3(x, lambda, 0.0);
            out.junction_deviation = std::max(
                {out.junction_deviation, a.lpNorm<Eigen::Infinity>(),
                 b.lpNorm<Eigen::Infinity>()});
        }
    }

    // Certified boundary signs are preserved for all (lambda, sigma): the
    // cutoffs vanish on the boundary so F agrees with the reference there.
    double worst = std::numeric_limits<double>::infinity();
    bool any_face = false;
    for (const auto& face : fam.pair.parent.faces) {
        if (face.role == FaceRole::Tangency) continue;
        any_face = true;
        Vec normal = face.outward_normal(n);
        double want = face.role == FaceRole::Exit ? 1.0 : -1.0;
        for (int p = 0; p <= 4; ++p) {
            Vec x(n);
            for (int i = 0; i < n; ++i) {
                const auto& I = fam.block_box.iv[i];
                x[i] = i == face.axis ? face.coordinate
                                      : I.lo + I.width() * (0.125 + 0.1875 * p);
            }
            for (int il = 0; il <= 4; ++il) {
                double lambda = face.lambda_range.lo +
                                (face.lambda_range.hi - face.lambda_range.lo) * il / 4.0;
                for (int m = 0; m <= 4; ++m) {
                    Vec v = fam.eval(x, lambda, m / 4.0);
                    worst = std::min(worst, want * v.dot(normal));
                }
            }
        }
    }
    out.boundary_sign_worst_margin = any_face ? worst : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// family artifact

namespace {

void write_box(std::ostream& os, const std::string& key, const Box& b) {
    os << key;
    for (const auto& I : b.iv)
        os << " " << format_real(I.lo) << " " << format_real(I.hi);
    os << "\n";
}

Box read_box(std::istringstream& is, int dim) {
    Box b;
    b.iv.resize(dim);
    for (int i = 0; i < dim; ++i)
        if (!(is >> b.iv[i].lo >> b.iv[i].hi))
            throw MalformedInput("truncated box in family file");
    return b;
}

}  // namespace

std::string serialize_family(const SynthesizedFamily& fam) {
    std::ostringstream os;
    int n = fam.data.dim;
    os << "foldcert/family v1\n";
    os << "field " << fam.base.name;
    for (double p : fam.base.params) os << " " << format_real(p);
    os << "\n";
    os << "dim " << n << "\n";
    os << "unstable_dim " << fam.unstable_dim << "\n";
    os << "amplitude " << format_real(fam.amplitude) << "\n";
    os << "f1_scale " << format_real(fam.f1_scale) << "\n";
    os << "graphic_mesh " << fam.graphic_mesh << "\n";
    os << "terminal_direction";
    for (int i = 0; i < n; ++i) os << " " << format_real(fam.terminal_direction[i]);
    os << "\n";
    write_box(os, "block_box", fam.block_box);
    write_box(os, "inner_box", fam.inner_box);
    write_box(os, "outer_box", fam.rho.outer);
    os << "eta " << format_real(fam.eta.plateau_end) << " "
       << format_real(fam.eta.support_end) << "\n";
    os << "xi " << format_real(fam.xi.plateau_end) << " "
       << format_real(fam.xi.support_end) << "\n";
    os << "split " << fam.pair.split_axis << " " << fam.pair.split_node << " "
       << format_real(fam.pair.split_coordinate) << "\n";
    os << "whitney " << format_real(fam.whitney.lambda0) << " " << fam.whitney.sign
       << " " << format_real(fam.whitney.g0) << " " << fam.whitney.q_plus << " "
       << fam.whitney.q_minus << "\n";
    os << "whitney_center";
    for (int i = 0; i < n; ++i) os << " " << format_real(fam.whitney.chart_center[i]);
    os << "\n";
    os << "whitney_map";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) os << " " << format_real(fam.whitney.chart_map(i, j));
    os << "\n";
    write_box(os, "whitney_domain", fam.whitney.chart_domain);
    os << "lyapunov_res";
    for (int r : fam.lyapunov.g.res) os << " " << r;
    os << "\n";
    write_box(os, "lyapunov_domain", fam.lyapunov.g.domain);
    os << "lyapunov_values " << fam.lyapunov.g.values.size();
    for (double v : fam.lyapunov.g.values) os << " " << format_real(v);
    os << "\n";
    os << "samples_begin\n";
    os << serialize_samples(fam.data);
    os << "samples_end\n";
    return os.str();
}

SynthesizedFamily parse_family(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "foldcert/family v1")
        throw MalformedInput("family file must start with 'foldcert/family v1'");

    SynthesizedFamily fam;
    int n = 0;
    Box outer_box;
    double eta_p = 0, eta_s = 0, xi_p = 0, xi_s = 0;
    std::string sample_text;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string key;
        is >> key;
        if (key == "field") {
            std::string name;
            is >> name;
            std::vector<double> params;
            double p;
            while (is >> p) params.push_back(p);
            fam.base = make_field(name, params);
        } else if (key == "dim") {
            is >> n;
        } else if (key == "unstable_dim") {
            is >> fam.unstable_dim;
        } else if (key == "amplitude") {
            is >> fam.amplitude;
        } else if (key == "f1_scale") {
            is >> fam.f1_scale;
        } else if (key == "graphic_mesh") {
            is >> fam.graphic_mesh;
        } else if (key == "terminal_direction") {
            fam.terminal_direction = Vec(n);
            for (int i = 0; i < n; ++i) is >> fam.terminal_direction[i];
        } else if (key == "block_box") {
            fam.block_box = read_box(is, n);
        } else if (key == "inner_box") {
            fam.inner_box = read_box(is, n);
        } else if (key == "outer_box") {
            outer_box = read_box(is, n);
        } else if (key == "eta") {
            is >> eta_p >> eta_s;
        } else if (key == "xi") {
            is >> xi_p >> xi_s;
        } else if (key == "split") {
            is >> fam.pair.split_axis >> fam.pair.split_node >>
                fam.pair.split_coordinate;
        } else if (key == "whitney") {
            is >> fam.whitney.lambda0 >> fam.whitney.sign >> fam.whitney.g0 >>
                fam.whitney.q_plus >> fam.whitney.q_minus;
        } else if (key == "whitney_center") {
            fam.whitney.chart_center = Vec(n);
            for (int i = 0; i < n; ++i) is >> fam.whitney.chart_center[i];
        } else if (key == "whitney_map") {
            fam.whitney.chart_map = Eigen::MatrixXd(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) is >> fam.whitney.chart_map(i, j);
        } else if (key == "whitney_domain") {
            fam.whitney.chart_domain = read_box(is, n);
        } else if (key == "lyapunov_res") {
            fam.lyapunov.g.res.clear();
            int r;
            while (is >> r) fam.lyapunov.g.res.push_back(r);
        } else if (key == "lyapunov_domain") {
            fam.lyapunov.g.domain = read_box(is, n + 1);
        } else if (key == "lyapunov_values") {
            size_t count;
            is >> count;
            fam.lyapunov.g.values.resize(count);
            for (size_t i = 0; i < count; ++i)
                if (!(is >> fam.lyapunov.g.values[i]))
                    throw MalformedInput("truncated lyapunov values");
        } else if (key == "samples_begin") {
            std::ostringstream sb;
            while (std::getline(in, line) && line != "samples_end") sb << line << "\n";
            sample_text = sb.str();
        } else {
            throw MalformedInput("unknown family key: " + key);
        }
    }
    if (n < 1) throw MalformedInput("family file missing dim");
    fam.data = parse_samples(sample_text);
    fam.whitney.validate();
    fam.rho.inner = fam.inner_box;
    fam.rho.outer = outer_box;
    fam.rho.validate();
    fam.rho0 = fam.rho1 = fam.rho;
    fam.eta = LambdaCutoff{eta_p, eta_s, true};
    fam.xi = LambdaCutoff{xi_p, xi_s, false};
    fam.eta.validate();
    fam.xi.validate();
    fam.lyapunov.g.compute_gradients();
    auto [f0, f1] = endpoint_families(fam.base, fam);
    fam.f0 = f0;
    fam.f1 = f1;
    fam.graphic = single_death_graphic(fam.whitney, fam.amplitude, fam.unstable_dim,
                                       fam.graphic_mesh);
    return fam;
}

}  // namespace foldcert
