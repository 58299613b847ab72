#include "foldcert/cerf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace foldcert {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Crossing: return "Crossing";
        case EventKind::CubicBirth: return "CubicBirth";
        default: return "CubicDeath";
    }
}

double CerfArc::value_at(double lambda) const {
    if (lambda_mesh.empty()) throw Error("arc has no mesh");
    if (lambda <= lambda_mesh.front()) return values.front();
    if (lambda >= lambda_mesh.back()) return values.back();
    auto it = std::upper_bound(lambda_mesh.begin(), lambda_mesh.end(), lambda);
    size_t i = static_cast<size_t>(it - lambda_mesh.begin());
    double t = (lambda - lambda_mesh[i - 1]) / (lambda_mesh[i] - lambda_mesh[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
}

bool CerfArc::alive_at(double lambda, double tol) const {
    return lambda >= lambda_interval.lo - tol && lambda <= lambda_interval.hi + tol;
}

std::vector<int> CerfGraphic::arcs_alive_at(double lambda) const {
    std::vector<int> out;
    for (size_t i = 0; i < arcs.size(); ++i)
        if (arcs[i].alive_at(lambda)) out.push_back(static_cast<int>(i));
    return out;
}

void CerfGraphic::validate() const {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& e : events) {
        if (!(e.lambda > prev))
            throw PreconditionViolated("event lambdas must be strictly increasing");
        prev = e.lambda;
        for (int a : e.arcs)
            if (a < 0 || a >= static_cast<int>(arcs.size()))
                throw PreconditionViolated("event references an unknown arc");
        if (e.kind == EventKind::CubicBirth || e.kind == EventKind::CubicDeath) {
            if (e.arcs.size() != 2)
                throw PreconditionViolated("cubic events join exactly two arcs");
            int d = std::abs(arcs[e.arcs[0]].morse_index - arcs[e.arcs[1]].morse_index);
            if (d != 1)
                throw PreconditionViolated(
                    "cubic events join arcs of adjacent Morse index");
        }
        if (e.kind == EventKind::Crossing) {
            if (e.arcs.size() != 2)
                throw PreconditionViolated("crossing events join exactly two arcs");
            double va = arcs[e.arcs[0]].value_at(e.lambda);
            double vb = arcs[e.arcs[1]].value_at(e.lambda);
            if (std::abs(va - vb) > 1e-9)
                throw PreconditionViolated("crossing arcs must share the value at the event");
        }
    }
    for (const auto& a : arcs) {
        if (a.lambda_mesh.size() != a.values.size() || a.lambda_mesh.size() < 2)
            throw PreconditionViolated("arc mesh and values must align (>= 2 points)");
        if (!std::is_sorted(a.lambda_mesh.begin(), a.lambda_mesh.end()))
            throw PreconditionViolated("arc mesh must be sorted");
    }
}

void WhitneyModel::validate() const {
    if (!(lambda0 > 0.0 && lambda0 < 1.0))
        throw ConfigInvalid("whitney lambda0 must lie in (0,1)");
    if (sign != +1 && sign != -1) throw ConfigInvalid("whitney sign must be +1 or -1");
    int n = phase_dim();
    if (q_plus + q_minus != n - 1)
        throw ConfigInvalid("whitney signature must satisfy p+q = n-1");
    if (chart_map.rows() != n || chart_map.cols() != n)
        throw ConfigInvalid("whitney chart map must be n x n");
    if (std::abs(chart_map.determinant()) < 1e-14)
        throw ConfigInvalid("whitney chart map must be invertible");
}

Vec WhitneyModel::to_chart(const Vec& x) const {
    if (!chart_domain.contains(x, 1e-9))
        throw OutOfChart("point outside the whitney chart domain");
    return chart_map * (x - chart_center);
}

double WhitneyModel::quadratic(const Vec& yz) const {
    double q = 0.0;
    for (int i = 0; i < q_plus; ++i) q += yz[i] * yz[i];
    for (int i = q_plus; i < q_plus + q_minus; ++i) q -= yz[i] * yz[i];
    return q;
}

double whitney_value(const WhitneyModel& model, const Vec& x, double lambda) {
    Vec yz = model.to_chart(x);
    double z = yz[model.phase_dim() - 1];
    return model.g0 + z * z * z + model.sign * (lambda - model.lambda0) * z +
           model.quadratic(yz);
}

Vec whitney_gradient(const WhitneyModel& model, const Vec& x, double lambda) {
    Vec yz = model.to_chart(x);
    int n = model.phase_dim();
    double z = yz[n - 1];
    Vec grad_chart(n);
    for (int i = 0; i < n - 1; ++i)
        grad_chart[i] = (i < model.q_plus ? 2.0 : -2.0) * yz[i];
    grad_chart[n - 1] = 3.0 * z * z + model.sign * (lambda - model.lambda0);
    // d g / dx = J^T dg/d(chart)
    return model.chart_map.transpose() * grad_chart;
}

std::vector<double> whitney_critical_values(const WhitneyModel& model, double lambda) {
    double mu = model.sign * (model.lambda0 - lambda);
    if (mu < 0.0) return {};
    if (mu == 0.0) return {model.g0};
    double r = (2.0 * mu / 3.0) * std::sqrt(mu / 3.0);
    return {model.g0 - r, model.g0 + r};
}

EventKind classify_event(const std::vector<CriticalSnapshot>& window) {
    if (window.size() < 4) throw Unclassifiable("window too short to classify");
    for (size_t i = 1; i < window.size(); ++i)
        if (!(window[i].lambda > window[i - 1].lambda))
            throw Unclassifiable("window lambdas must be increasing");

    std::vector<int> counts;
    for (const auto& s : window) counts.push_back(static_cast<int>(s.points.size()));
    int c0 = counts.front(), c1 = counts.back();

    // one transition at most
    int transitions = 0;
    size_t t_idx = 0;
    for (size_t i = 1; i < counts.size(); ++i)
        if (counts[i] != counts[i - 1]) {
            ++transitions;
            t_idx = i;
        }
    if (transitions > 1) throw Unclassifiable("window contains multiple count changes");

    if (transitions == 0) {
        if (c0 != 2) throw Unclassifiable("persistent census is not a pair");
        // crossing: value difference changes sign; positions stay separated
        double pos_gap_min = std::numeric_limits<double>::infinity();
        bool seen_pos = false, seen_neg = false, seen_zero = false;
        for (const auto& snap : window) {
            const auto& p = snap.points;
            double diff = p[0].value - p[1].value;
            pos_gap_min = std::min(pos_gap_min, std::abs(p[0].position - p[1].position));
            if (diff > 0.0) seen_pos = true;
            else if (diff < 0.0) seen_neg = true;
            else seen_zero = true;
        }
        bool sign_change = (seen_pos && seen_neg) || (seen_zero && (seen_pos || seen_neg));
        if (!sign_change) throw Unclassifiable("no value crossing inside the window");
        if (pos_gap_min < 1e-9)
            throw Unclassifiable("crossing critical points are not distinct");
        return EventKind::Crossing;
    }

    if (!((c0 == 2 && c1 == 0) || (c0 == 0 && c1 == 2)))
        throw Unclassifiable("count transition is not a pair birth/death");
    bool death = c0 == 2;

    // the side where the pair exists
    std::vector<double> lam, gap;
    for (size_t i = 0; i < window.size(); ++i) {
        if (window[i].points.size() != 2) continue;
        const auto& p = window[i].points;
        if (std::abs(p[0].morse_index - p[1].morse_index) != 1)
            throw Unclassifiable("merging critical points must have adjacent index");
        lam.push_back(window[i].lambda);
        gap.push_back(std::abs(p[0].position - p[1].position));
    }
    if (lam.size() < 3) throw Unclassifiable("too few pair snapshots for the gap fit");

    // estimate the event lambda from the linear trend of gap^2
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lam.size(); ++i) {
        double g2 = gap[i] * gap[i];
        sx += lam[i];
        sy += g2;
        sxx += lam[i] * lam[i];
        sxy += lam[i] * g2;
    }
    double m = static_cast<double>(lam.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double inter = (sy - slope * sx) / m;
    if (std::abs(slope) < 1e-15) throw Unclassifiable("gap does not close");
    double lambda_e = -inter / slope;

    // exponent of gap ~ C |lambda_e - lambda|^e
    double tx = 0, ty = 0, txx = 0, txy = 0;
    int used = 0;
    for (size_t i = 0; i < lam.size(); ++i) {
        double d = std::abs(lambda_e - lam[i]);
        if (d < 1e-12 || gap[i] < 1e-12) continue;
        double lx = std::log(d), ly = std::log(gap[i]);
        tx += lx;
        ty += ly;
        txx += lx * lx;
        txy += lx * ly;
        ++used;
    }
    if (used < 3) throw Unclassifiable("degenerate gap data");
    double e = (used * txy - tx * ty) / (used * txx - tx * tx);
    if (e < 0.35 || e > 0.65)
        throw Unclassifiable("gap exponent " + format_real(e) +
                             " violates the cusp asymptotics");
    (void)t_idx;
    return death ? EventKind::CubicDeath : EventKind::CubicBirth;
}

namespace {

std::vector<double> uniform_mesh(double lo, double hi, int points) {
    std::vector<double> m(points);
    for (int i = 0; i < points; ++i)
        m[i] = lo + (hi - lo) * i / (points - 1);
    m.front() = lo;
    m.back() = hi;
    return m;
}

}  // namespace

CerfGraphic apply_uniqueness_of_birth(const CerfGraphic& g, const CerfRewriteOptions& opts) {
    if (!g.events.empty())
        throw PreconditionViolated("input graphic must be event-free");
    if (g.arcs.size() != 2)
        throw PreconditionViolated("input graphic must consist of exactly two arcs");
    const CerfArc& p = g.arcs[0];
    const CerfArc& q = g.arcs[1];
    for (const auto* a : {&p, &q})
        if (a->lambda_interval.lo != 0.0 || a->lambda_interval.hi != 1.0)
            throw PreconditionViolated("arcs must span all of Lambda");
    if (!(p.cancels_with && *p.cancels_with == 1 && q.cancels_with && *q.cancels_with == 0))
        throw PreconditionViolated("arcs must be linked as algebraically canceling");
    if (std::abs(p.morse_index - q.morse_index) != 1)
        throw PreconditionViolated("canceling arcs must have adjacent Morse indices");
    if (!(opts.death_lambda > 0.0 && opts.death_lambda < opts.birth_lambda &&
          opts.birth_lambda < 1.0))
        throw ConfigInvalid("rewrite event placement must satisfy 0 < death < birth < 1");

    double w0 = std::max(0.0, opts.death_lambda - opts.window_margin);
    double w1 = std::min(1.0, opts.birth_lambda + opts.window_margin);

    auto cusp_side = [&](const CerfArc& src, bool on_left, bool upper) {
        // left: arcs die at death_lambda; right: arcs are born at birth_lambda
        CerfArc a;
        a.morse_index = src.morse_index;
        double ev = on_left ? opts.death_lambda : opts.birth_lambda;
        double edge = on_left ? 0.0 : 1.0;
        double wall = on_left ? w0 : w1;
        a.lambda_interval = on_left ? Interval{0.0, ev} : Interval{ev, 1.0};
        int points = static_cast<int>(src.lambda_mesh.size());
        auto mesh = on_left ? uniform_mesh(0.0, ev, points) : uniform_mesh(ev, 1.0, points);
        a.lambda_mesh = mesh;
        a.values.resize(mesh.size());
        for (size_t i = 0; i < mesh.size(); ++i) {
            double lam = mesh[i];
            double vp = p.value_at(lam), vq = q.value_at(lam);
            double center = 0.5 * (vp + vq);
            double half = 0.5 * std::abs(vp - vq);
            bool inside = on_left ? (lam > wall) : (lam < wall);
            if (!inside || wall == ev) {
                a.values[i] = upper ? std::max(vp, vq) : std::min(vp, vq);
            } else {
                // cusp profile: half-gap ~ (distance to event)^{3/2}
                double t = std::abs(ev - lam) / std::abs(ev - wall);
                double r = half * std::pow(t, 1.5);
                a.values[i] = upper ? center + r : center - r;
            }
        }
        (void)edge;
        return a;
    };

    bool p_upper = p.value_at(opts.death_lambda) >= q.value_at(opts.death_lambda);

    CerfGraphic out;
    out.arcs.push_back(cusp_side(p, true, p_upper));    // 0: p left
    out.arcs.push_back(cusp_side(q, true, !p_upper));   // 1: q left
    out.arcs.push_back(cusp_side(p, false, p_upper));   // 2: p right
    out.arcs.push_back(cusp_side(q, false, !p_upper));  // 3: q right
    out.arcs[0].cancels_with = 1;
    out.arcs[1].cancels_with = 0;
    out.arcs[2].cancels_with = 3;
    out.arcs[3].cancels_with = 2;

    // preserve the endpoint fibers exactly
    out.arcs[0].values.front() = p.values.front();
    out.arcs[1].values.front() = q.values.front();
    out.arcs[2].values.back() = p.values.back();
    out.arcs[3].values.back() = q.values.back();

    out.events.push_back({opts.death_lambda, EventKind::CubicDeath, {0, 1}});
    out.events.push_back({opts.birth_lambda, EventKind::CubicBirth, {2, 3}});
    out.validate();
    return out;
}

CerfGraphic simplify_to_single_death(const CerfGraphic& g) {
    g.validate();
    if (g.events.empty() || g.events[0].kind != EventKind::CubicDeath)
        throw PreconditionViolated("graphic must open with a cubic death");
    if (!g.arcs_alive_at(1.0).empty())
        throw PreconditionViolated("graphic has a nonempty right endpoint");
    if (g.events.size() == 1) {
        // already a single-death graphic
        for (const auto& a : g.arcs)
            if (a.lambda_interval.hi > g.events[0].lambda + 1e-12)
                throw PreconditionViolated("arcs extend past the single death");
        return g;
    }
    if (g.events[1].kind != EventKind::CubicBirth)
        throw PreconditionViolated("graphic is not of death-then-birth shape");
    for (size_t i = 2; i < g.events.size(); ++i)
        if (g.events[i].kind != EventKind::CubicDeath)
            throw PreconditionViolated("events after the birth must close the arcs");

    double death_lambda = g.events[0].lambda;
    CerfGraphic out;
    for (const auto& a : g.arcs)
        if (a.lambda_interval.hi <= death_lambda + 1e-12) out.arcs.push_back(a);
    // re-link cancellation flags by position
    if (out.arcs.size() == 2) {
        out.arcs[0].cancels_with = 1;
        out.arcs[1].cancels_with = 0;
    }
    CerfEvent death = g.events[0];
    death.arcs.clear();
    for (size_t i = 0; i < out.arcs.size(); ++i)
        if (std::abs(out.arcs[i].lambda_interval.hi - death_lambda) <= 1e-12)
            death.arcs.push_back(static_cast<int>(i));
    out.events.push_back(death);
    out.validate();
    return out;
}

CerfGraphic single_death_graphic(const WhitneyModel& model, double amplitude,
                                 int unstable_dim, int mesh_points) {
    model.validate();
    CerfGraphic g;
    auto mesh = uniform_mesh(0.0, model.lambda0, mesh_points);
    CerfArc upper, lower;
    upper.lambda_interval = lower.lambda_interval = {0.0, model.lambda0};
    upper.lambda_mesh = lower.lambda_mesh = mesh;
    upper.morse_index = unstable_dim;      // repeller arc carries the larger value
    lower.morse_index = unstable_dim - 1;  // attractor arc
    for (double lam : mesh) {
        auto vals = whitney_critical_values(model, lam);
        if (vals.empty()) {
            upper.values.push_back(amplitude * model.g0);
            lower.values.push_back(amplitude * model.g0);
        } else if (vals.size() == 1) {
            upper.values.push_back(amplitude * vals[0]);
            lower.values.push_back(amplitude * vals[0]);
        } else {
            lower.values.push_back(amplitude * vals[0]);
            upper.values.push_back(amplitude * vals[1]);
        }
    }
    upper.cancels_with = 1;
    lower.cancels_with = 0;
    g.arcs.push_back(std::move(upper));
    g.arcs.push_back(std::move(lower));
    g.events.push_back({model.lambda0, EventKind::CubicDeath, {0, 1}});
    g.validate();
    return g;
}

std::string graphic_table(const CerfGraphic& g) {
    std::ostringstream os;
    os << "lambda\tvalue\tmorse_index\tarc_id\n";
    for (size_t a = 0; a < g.arcs.size(); ++a) {
        const auto& arc = g.arcs[a];
        for (size_t i = 0; i < arc.lambda_mesh.size(); ++i)
            os << format_real(arc.lambda_mesh[i]) << "\t" << format_real(arc.values[i])
               << "\t" << arc.morse_index << "\t" << a << "\n";
    }
    return os.str();
}

std::string event_table(const CerfGraphic& g) {
    std::ostringstream os;
    os << "lambda\tkind\tarcs\n";
    for (const auto& e : g.events) {
        os << format_real(e.lambda) << "\t" << to_string(e.kind) << "\t";
        for (size_t i = 0; i < e.arcs.size(); ++i) os << (i ? "," : "") << e.arcs[i];
        os << "\n";
    }
    return os.str();
}

std::string graphic_svg(const CerfGraphic& g, int width, int height) {
    double vmin = 0.0, vmax = 1.0;
    bool first = true;
    for (const auto& a : g.arcs)
        for (double v : a.values) {
            if (first) {
                vmin = vmax = v;
                first = false;
            }
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    if (vmax - vmin < 1e-12) {
        vmin -= 1.0;
        vmax += 1.0;
    }
    double pad = 0.08 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;
    const int ml = 50, mr = 15, mt = 15, mb = 35;
    auto X = [&](double lam) { return ml + lam * (width - ml - mr); };
    auto Y = [&](double v) {
        return mt + (vmax - v) / (vmax - vmin) * (height - mt - mb);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(vmin) << "\" x2=\"" << X(1)
       << "\" y2=\"" << Y(vmin) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(vmin) << "\" x2=\"" << X(0)
       << "\" y2=\"" << Y(vmax) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (width - mr - 60) << "\" y=\"" << (height - 8)
       << "\" font-size=\"13\">lambda</text>\n";
    os << "<text x=\"6\" y=\"" << (mt + 12)
       << "\" font-size=\"13\">critical value</text>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                            "#8c564b", "#e377c2"};
    for (size_t a = 0; a < g.arcs.size(); ++a) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[a % 6]
           << "\" stroke-width=\"1.6\" points=\"";
        for (size_t i = 0; i < g.arcs[a].lambda_mesh.size(); ++i)
            os << X(g.arcs[a].lambda_mesh[i]) << "," << Y(g.arcs[a].values[i]) << " ";
        os << "\"/>\n";
    }
    for (const auto& e : g.events) {
        double v = e.arcs.empty() ? 0.5 * (vmin + vmax)
                                  : g.arcs[e.arcs[0]].value_at(e.lambda);
        os << "<circle cx=\"" << X(e.lambda) << "\" cy=\"" << Y(v)
           << "\" r=\"4\" fill=\"black\"/>\n";
        os << "<text x=\"" << X(e.lambda) + 6 << "\" y=\"" << Y(v) - 6
           << "\" font-size=\"11\">" << to_string(e.kind) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace foldcert
