#include "foldcert/sign_certificates.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace foldcert {

std::string to_string(Sign s) {
    switch (s) {
        case Sign::Positive: return "Positive";
        case Sign::Negative: return "Negative";
        default: return "Undetermined";
    }
}

bool FaceRegion::contains(const Vec& x, double lambda, double tol) const {
    if (x.size() != phase_dim) return false;
    for (int i = 0; i < phase_dim; ++i) {
        if (i == pinned_axis) {
            if (std::abs(x[i] - pinned_value) > tol) return false;
        } else if (!phase_ranges.iv[i].contains(x[i], tol)) {
            return false;
        }
    }
    if (pinned_axis == phase_dim) {
        if (std::abs(lambda - pinned_value) > tol) return false;
    } else if (!lambda_range.contains(lambda, tol)) {
        return false;
    }
    return true;
}

std::string FaceRegion::describe() const {
    std::ostringstream os;
    if (pinned_axis == phase_dim)
        os << "slice lambda=" << pinned_value;
    else
        os << "face x" << pinned_axis << "=" << pinned_value;
    if (pinned_axis != phase_dim && lambda_range.degenerate())
        os << " @ lambda=" << lambda_range.lo;
    return os.str();
}

double FaceQuantity::apply(const Vec& f) const {
    if (kind == Kind::Component) return f[component];
    return direction.dot(f);
}

std::string FaceQuantity::describe() const {
    if (kind == Kind::Component) return "f[" + std::to_string(component) + "]";
    std::ostringstream os;
    os << "f.(";
    for (int i = 0; i < direction.size(); ++i) os << (i ? "," : "") << direction[i];
    os << ")";
    return os.str();
}

FaceQuantity FaceQuantity::component_of(int idx) {
    FaceQuantity q;
    q.kind = Kind::Component;
    q.component = idx;
    return q;
}

FaceQuantity FaceQuantity::along(const Vec& dir) {
    FaceQuantity q;
    q.kind = Kind::Directional;
    q.direction = dir.normalized();
    return q;
}

namespace {

std::vector<size_t> samples_on_face(const SampledVectorField& svf, const FaceRegion& face,
                                    double tol) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < svf.samples.size(); ++i)
        if (face.contains(svf.samples[i].x, svf.samples[i].lambda, tol))
            idx.push_back(i);
    return idx;
}

// Enumerate a probe mesh over the face's free axes.
void probe_points(const FaceRegion& face, int probes,
                  const std::function<void(const Vec&, double)>& visit) {
    int n = face.phase_dim;
    std::vector<int> free_axes;  // phase axes + (n means lambda)
    for (int i = 0; i < n; ++i)
        if (i != face.pinned_axis && !face.phase_ranges.iv[i].degenerate())
            free_axes.push_back(i);
    bool lambda_free = face.pinned_axis != n && !face.lambda_range.degenerate();
    int m = static_cast<int>(free_axes.size()) + (lambda_free ? 1 : 0);

    std::vector<int> counter(m, 0);
    Vec x(n);
    for (int i = 0; i < n; ++i)
        x[i] = (i == face.pinned_axis) ? face.pinned_value : face.phase_ranges.iv[i].lo;
    double lambda = face.pinned_axis == n ? face.pinned_value : face.lambda_range.lo;

    while (true) {
        for (size_t a = 0; a < free_axes.size(); ++a) {
            const auto& I = face.phase_ranges.iv[free_axes[a]];
            x[free_axes[a]] = I.lo + I.width() * counter[a] / (probes - 1);
        }
        if (lambda_free) {
            const auto& I = face.lambda_range;
            lambda = I.lo + I.width() * counter[m - 1] / (probes - 1);
        }
        visit(x, lambda);
        int c = 0;
        while (c < m && ++counter[c] == probes) counter[c++] = 0;
        if (c == m && m > 0) break;
        if (m == 0) break;
    }
}

}  // namespace

double covering_radius(const SampledVectorField& svf, const FaceRegion& face,
                       int probes_per_axis, double on_face_tol) {
    auto idx = samples_on_face(svf, face, on_face_tol);
    if (idx.empty()) throw NoSamplesOnFace("no samples on " + face.describe());
    probes_per_axis = std::max(probes_per_axis, 2);

    double worst = 0.0;
    probe_points(face, probes_per_axis, [&](const Vec& x, double lambda) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t i : idx) {
            const auto& s = svf.samples[i];
            double d2 = (s.x - x).squaredNorm();
            double dl = s.lambda - lambda;
            d2 += dl * dl;
            best = std::min(best, d2);
        }
        worst = std::max(worst, best);
    });
    return std::sqrt(worst);
}

SignCertificate certify_face_sign(const SampledVectorField& svf, const FaceRegion& face,
                                  const FaceQuantity& quantity, double spacing,
                                  double on_face_tol) {
    auto idx = samples_on_face(svf, face, on_face_tol);
    if (idx.empty()) throw NoSamplesOnFace("no samples on " + face.describe());

    SignCertificate cert;
    cert.face = face.describe();
    cert.quantity = quantity.describe();
    cert.sample_count = static_cast<int>(idx.size());
    cert.covering_radius = spacing;

    bool any_pos = false, any_neg = false, any_zero = false;
    double min_abs = std::numeric_limits<double>::infinity();
    for (size_t i : idx) {
        double q = quantity.apply(svf.samples[i].f);
        if (q > 0.0) any_pos = true;
        else if (q < 0.0) any_neg = true;
        else any_zero = true;
        min_abs = std::min(min_abs, std::abs(q));
    }

    if (any_pos && any_neg) {
        cert.sign = Sign::Undetermined;
        cert.margin = -std::numeric_limits<double>::infinity();
        return cert;
    }
    double margin = min_abs - svf.lipschitz_bound * spacing;
    cert.margin = margin;
    if (!any_zero && margin > 0.0)
        cert.sign = any_pos ? Sign::Positive : Sign::Negative;
    else
        cert.sign = Sign::Undetermined;
    return cert;
}

void BlockSpec::validate(int dim) const {
    if (box.dim() != dim)
        throw DimensionMismatch("block box dimension does not match samples");
    if (interior_point.size() != dim)
        throw DimensionMismatch("interior point dimension does not match samples");
    if (split_axis < 0 || split_axis >= dim)
        throw ConfigInvalid("split axis out of range");
    if (!box.contains(interior_point))
        throw ConfigInvalid("interior point lies outside the block box");
    for (const auto& I : box.iv)
        if (I.width() <= 0.0) throw ConfigInvalid("block box has empty axis");
}

AssumptionReport check_block_assumptions(const SampledVectorField& svf,
                                         const BlockSpec& block, double spacing) {
    block.validate(svf.dim);
    int n = svf.dim;
    AssumptionReport rep;
    rep.certified = true;

    auto note_failure = [&](const std::string& name) {
        if (rep.first_failure.empty()) rep.first_failure = name;
        rep.certified = false;
    };

    auto face_spacing = [&](const FaceRegion& face) {
        return spacing > 0.0 ? spacing : covering_radius(svf, face);
    };

    // determinate outward-flux sign on every phase face, all lambda
    for (int axis = 0; axis < n; ++axis) {
        for (int side : {-1, +1}) {
            FaceRegion face;
            face.phase_dim = n;
            face.pinned_axis = axis;
            face.pinned_value = side < 0 ? block.box.iv[axis].lo : block.box.iv[axis].hi;
            face.phase_ranges = block.box;
            face.lambda_range = {0.0, 1.0};
            Vec normal = Vec::Zero(n);
            normal[axis] = side;
            std::string name = "boundary flux " + face.describe();
            AssumptionReport::Entry e;
            e.name = name;
            try {
                e.cert = certify_face_sign(svf, face, FaceQuantity::along(normal),
                                           face_spacing(face));
                if (!e.cert.determinate()) note_failure(name);
            } catch (const NoSamplesOnFace&) {
                e.present = false;
                e.cert.face = face.describe();
                note_failure(name);
            }
            rep.entries.push_back(std::move(e));
        }
    }

    // one directional sign over the whole terminal slice
    {
        FaceRegion slice;
        slice.phase_dim = n;
        slice.pinned_axis = n;
        slice.pinned_value = 1.0;
        slice.phase_ranges = block.box;
        Vec dir = block.terminal_direction ? *block.terminal_direction : Vec::Zero(n);
        if (!block.terminal_direction) dir[block.split_axis] = 1.0;
        std::string name = "terminal slice sign";
        AssumptionReport::Entry e;
        e.name = name;
        try {
            e.cert = certify_face_sign(svf, slice, FaceQuantity::along(dir),
                                       face_spacing(slice));
            if (!e.cert.determinate()) note_failure(name);
        } catch (const NoSamplesOnFace&) {
            e.present = false;
            e.cert.face = slice.describe();
            note_failure(name);
        }
        rep.entries.push_back(std::move(e));
    }

    // certified nonvanishing direction at (interior_point, 0)
    {
        FaceRegion point;
        point.phase_dim = n;
        point.pinned_axis = block.split_axis;
        point.pinned_value = block.interior_point[block.split_axis];
        point.phase_ranges.iv.resize(n);
        for (int i = 0; i < n; ++i)
            point.phase_ranges.iv[i] = {block.interior_point[i], block.interior_point[i]};
        point.lambda_range = {0.0, 0.0};
        Vec dir = Vec::Zero(n);
        dir[block.split_axis] = 1.0;
        std::string name = "interior witness";
        AssumptionReport::Entry e;
        e.name = name;
        try {
            e.cert = certify_face_sign(svf, point, FaceQuantity::along(dir), 0.0);
            if (!e.cert.determinate()) note_failure(name);
        } catch (const NoSamplesOnFace&) {
            e.present = false;
            e.cert.face = point.describe();
            note_failure(name);
        }
        rep.entries.push_back(std::move(e));
    }

    return rep;
}

}  // namespace foldcert
