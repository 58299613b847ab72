#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foldcert/geometry.hpp"

namespace foldcert {

enum class EventKind { Crossing, CubicBirth, CubicDeath };

std::string to_string(EventKind k);

// One arc of critical values over a lambda interval, sampled on a mesh.
struct CerfArc {
    Interval lambda_interval{0.0, 1.0};
    std::vector<double> lambda_mesh;
    std::vector<double> values;
    int morse_index = 0;
    std::optional<int> cancels_with;  // arc index; algebraic-cancellation flag

    double value_at(double lambda) const;  // linear interpolation on the mesh
    bool alive_at(double lambda, double tol = 1e-12) const;
};

struct CerfEvent {
    double lambda = 0.0;
    EventKind kind = EventKind::Crossing;
    std::vector<int> arcs;
};

struct CerfGraphic {
    std::vector<CerfArc> arcs;
    std::vector<CerfEvent> events;

    std::vector<int> arcs_alive_at(double lambda) const;  // endpoint fibers
    void validate() const;
};

// Whitney normal-form model g(x,lambda) = g0 + z^3 + sign*(lambda-lambda0)*z + Q(y)
// in an affine chart on the block interior.  Q has +1 coefficients on the
// first q_plus chart axes and -1 on the remaining q_minus (p + q = n - 1);
// the chart's last coordinate is z.
struct WhitneyModel {
    double lambda0 = 0.5;
    int sign = +1;
    double g0 = 0.0;
    int q_plus = 0;   // positive inertia of Q
    int q_minus = 0;  // negative inertia of Q
    Vec chart_center;          // phase point mapped to the chart origin
    Eigen::MatrixXd chart_map; // rows = chart coordinates as affine-linear maps
    Box chart_domain;          // phase-space box where the chart is valid

    int phase_dim() const { return static_cast<int>(chart_center.size()); }
    void validate() const;

    // chart coordinates (y_1..y_{n-1}, z) of a phase point
    Vec to_chart(const Vec& x) const;   // throws OutOfChart outside chart_domain
    double quadratic(const Vec& yz) const;  // Q(y)
};

double whitney_value(const WhitneyModel& model, const Vec& x, double lambda);

// Gradient of the normal form with respect to the phase variables.
Vec whitney_gradient(const WhitneyModel& model, const Vec& x, double lambda);

// Critical values of g(., lambda): with mu = sign*(lambda0 - lambda),
// {g0 +- (2mu/3)sqrt(mu/3)} for mu > 0, {g0} at mu = 0, empty for mu < 0.
std::vector<double> whitney_critical_values(const WhitneyModel& model, double lambda);

// Critical-point census of a path restricted to a small lambda window; the
// input of event classification.
struct CriticalSnapshot {
    double lambda = 0.0;
    struct Point {
        double position = 0.0;  // coordinate along the degenerate direction
        double value = 0.0;
        int morse_index = 0;
    };
    std::vector<Point> points;
};

// Decide Crossing / CubicBirth / CubicDeath from a window containing exactly
// one event candidate.  Cubic events must show the square-root gap
// asymptotics; anything else throws Unclassifiable.
EventKind classify_event(const std::vector<CriticalSnapshot>& window);

struct CerfRewriteOptions {
    double death_lambda = 1.0 / 3.0;
    double birth_lambda = 2.0 / 3.0;
    double window_margin = 0.10;  // how far outside the events the reshaping reaches
};

// Two event-free canceling arcs over all of Lambda -> a graphic with one
// cubic death followed by one cubic birth; endpoint fibers preserved.
CerfGraphic apply_uniqueness_of_birth(const CerfGraphic& g,
                                      const CerfRewriteOptions& opts = {});

// Death-then-birth graphic with empty right endpoint -> graphic with the
// single initial death; idempotent on single-death graphics.
CerfGraphic simplify_to_single_death(const CerfGraphic& g);

// The cusp graphic of an amplitude-scaled Whitney model: two arcs over
// [0, lambda0] with indices k-1 and k merging in a cubic death.
CerfGraphic single_death_graphic(const WhitneyModel& model, double amplitude,
                                 int unstable_dim, int mesh_points = 65);

// Tabular exports: one row per (arc, mesh point), plus the event table.
std::string graphic_table(const CerfGraphic& g);
std::string event_table(const CerfGraphic& g);
// Standalone vector drawing of the graphic.
std::string graphic_svg(const CerfGraphic& g, int width = 640, int height = 420);

}  // namespace foldcert
