#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "foldcert/cerf.hpp"

using namespace foldcert;

namespace {

WhitneyModel unit_model(int dim, double lambda0 = 0.5, int sign = +1,
                        double g0 = 0.0, int q_minus = 0) {
    WhitneyModel m;
    m.lambda0 = lambda0;
    m.sign = sign;
    m.g0 = g0;
    m.q_minus = q_minus;
    m.q_plus = dim - 1 - q_minus;
    m.chart_center = Vec::Zero(dim);
    m.chart_map = Eigen::MatrixXd::Identity(dim, dim);
    // z is the last chart coordinate; identity map puts it on the last axis
    m.chart_domain.iv.assign(dim, {-10.0, 10.0});
    m.validate();
    return m;
}

// Snapshots of the Whitney critical-point census over a lambda window.
std::vector<CriticalSnapshot> whitney_window(double lambda0, int sign, double lo,
                                             double hi, int points, int k = 1) {
    WhitneyModel m = unit_model(1, 0.5, sign);
    m.lambda0 = lambda0;
    std::vector<CriticalSnapshot> window;
    for (int i = 0; i < points; ++i) {
        CriticalSnapshot snap;
        // present the path so lambda increases toward the event
        double lam = lo + (hi - lo) * i / (points - 1);
        double real_lambda = sign > 0 ? lam : 2.0 * lambda0 - lam;
        snap.lambda = lam;
        double mu = sign * (lambda0 - real_lambda);
        if (mu > 0.0) {
            double z = std::sqrt(mu / 3.0);
            double v = (2.0 * mu / 3.0) * std::sqrt(mu / 3.0);
            snap.points.push_back({-z, +v, k});
            snap.points.push_back({+z, -v, k - 1});
        }
        window.push_back(std::move(snap));
    }
    return window;
}

}  // namespace

TEST_CASE("whitney_value evaluates the normal form") {
    SUBCASE("origin at the fold maps to g0") {
        auto m = unit_model(2, 0.5, +1, 3.25);
        Vec x = Vec::Zero(2);
        CHECK(whitney_value(m, x, 0.5) == 3.25);
    }
    SUBCASE("1D direct substitution") {
        auto m = unit_model(1);
        Vec x = Vec::Constant(1, 1.0);
        // z=1, lambda-lambda0 = -3: 1 - 3 = -2
        CHECK(whitney_value(m, x, m.lambda0 - 3.0) == -2.0);
    }
    SUBCASE("negative-definite Q contributes -y^2") {
        auto m = unit_model(2, 0.5, +1, 0.0, /*q_minus=*/1);
        Vec x(2);
        x << 2.0, 0.0;  // y=2, z=0
        CHECK(whitney_value(m, x, 0.5) == -4.0);
    }
    SUBCASE("points outside the chart domain are rejected") {
        auto m = unit_model(1);
        CHECK_THROWS_AS(whitney_value(m, Vec::Constant(1, 11.0), 0.5), OutOfChart);
    }
}

TEST_CASE("whitney critical values trace the cusp") {
    auto m = unit_model(1);
    SUBCASE("mu=3 gives the pair at +-2") {
        auto vals = whitney_critical_values(m, m.lambda0 - 3.0);
        REQUIRE(vals.size() == 2);
        CHECK(std::abs(vals[0] + 2.0) < 1e-12);
        CHECK(std::abs(vals[1] - 2.0) < 1e-12);
    }
    SUBCASE("the cusp point itself") {
        auto vals = whitney_critical_values(m, m.lambda0);
        REQUIRE(vals.size() == 1);
        CHECK(vals[0] == m.g0);
    }
    SUBCASE("no critical values past the fold") {
        CHECK(whitney_critical_values(m, m.lambda0 + 1.0).empty());
    }
    SUBCASE("cardinality 2/1/0 follows the sign of mu for both orientations") {
        for (int sign : {+1, -1}) {
            for (double lambda0 : {0.25, 0.5, 0.75}) {
                auto mm = unit_model(1, lambda0, sign);
                for (double lam = 0.05; lam < 1.0; lam += 0.1) {
                    double mu = sign * (lambda0 - lam);
                    size_t want = mu > 0.0 ? 2 : (mu == 0.0 ? 1 : 0);
                    CHECK(whitney_critical_values(mm, lam).size() == want);
                }
            }
        }
    }
}

TEST_CASE("classify_event labels the first-stratum events") {
    SUBCASE("whitney data approaching the fold is a cubic death") {
        // a 10-point grid of (lambda0, sign) configurations
        for (double lambda0 : {0.2, 0.35, 0.5, 0.65, 0.8}) {
            for (int sign : {+1, -1}) {
                auto window =
                    whitney_window(lambda0, sign, lambda0 - 0.1, lambda0 + 0.02, 14);
                CHECK(classify_event(window) == EventKind::CubicDeath);
            }
        }
    }
    SUBCASE("time-reversed whitney data is a cubic birth") {
        std::vector<CriticalSnapshot> window;
        auto death = whitney_window(0.5, +1, 0.4, 0.52, 14);
        for (auto it = death.rbegin(); it != death.rend(); ++it) {
            CriticalSnapshot s = *it;
            s.lambda = 1.0 - s.lambda;
            window.push_back(std::move(s));
        }
        CHECK(classify_event(window) == EventKind::CubicBirth);
    }
    SUBCASE("two crossing arcs with separated positions") {
        std::vector<CriticalSnapshot> window;
        for (int i = 0; i < 10; ++i) {
            double lam = 0.4 + 0.02 * i;
            CriticalSnapshot s;
            s.lambda = lam;
            s.points.push_back({-1.0, 0.5 - lam, 2});
            s.points.push_back({+1.0, lam - 0.5, 1});
            window.push_back(std::move(s));
        }
        CHECK(classify_event(window) == EventKind::Crossing);
    }
    SUBCASE("three merging critical points are unclassifiable") {
        std::vector<CriticalSnapshot> window;
        for (int i = 0; i < 10; ++i) {
            double lam = 0.4 + 0.02 * i;
            double r = std::max(0.58 - lam, 0.0);
            CriticalSnapshot s;
            s.lambda = lam;
            if (r > 0.0) {
                s.points.push_back({-r, r, 1});
                s.points.push_back({0.0, 0.0, 0});
                s.points.push_back({+r, -r, 1});
            }
            window.push_back(std::move(s));
        }
        CHECK_THROWS_AS(classify_event(window), Unclassifiable);
    }
    SUBCASE("a linear gap violates the cusp asymptotics") {
        std::vector<CriticalSnapshot> window;
        for (int i = 0; i < 12; ++i) {
            double lam = 0.4 + 0.01 * i;
            double r = 0.5 - lam;  // linear pinch, exponent 1
            CriticalSnapshot s;
            s.lambda = lam;
            if (r > 0.0) {
                s.points.push_back({-r, 1.0, 1});
                s.points.push_back({+r, 0.5, 0});
            }
            window.push_back(std::move(s));
        }
        CHECK_THROWS_AS(classify_event(window), Unclassifiable);
    }
}

TEST_CASE("uniqueness of birth rewrites two canceling arcs to death-then-birth") {
    auto g = fixtures::two_arc_graphic();
    auto out = apply_uniqueness_of_birth(g);

    REQUIRE(out.events.size() == 2);
    CHECK(out.events[0].kind == EventKind::CubicDeath);
    CHECK(out.events[1].kind == EventKind::CubicBirth);
    CHECK(out.events[0].lambda < out.events[1].lambda);

    SUBCASE("endpoint fibers are preserved exactly") {
        auto before0 = g.arcs_alive_at(0.0), after0 = out.arcs_alive_at(0.0);
        auto before1 = g.arcs_alive_at(1.0), after1 = out.arcs_alive_at(1.0);
        CHECK(before0.size() == after0.size());
        CHECK(before1.size() == after1.size());
        // values at the endpoints match the input arcs
        std::vector<double> in0, out0, in1, out1;
        for (int a : before0) in0.push_back(g.arcs[a].values.front());
        for (int a : after0) out0.push_back(out.arcs[a].values.front());
        for (int a : before1) in1.push_back(g.arcs[a].values.back());
        for (int a : after1) out1.push_back(out.arcs[a].values.back());
        std::sort(in0.begin(), in0.end());
        std::sort(out0.begin(), out0.end());
        std::sort(in1.begin(), in1.end());
        std::sort(out1.begin(), out1.end());
        CHECK(in0 == out0);
        CHECK(in1 == out1);
    }
    SUBCASE("no arcs live between death and birth") {
        double mid = 0.5 * (out.events[0].lambda + out.events[1].lambda);
        CHECK(out.arcs_alive_at(mid).empty());
    }
    SUBCASE("event lambdas are strictly increasing") {
        double prev = -1.0;
        for (const auto& e : out.events) {
            CHECK(e.lambda > prev);
            prev = e.lambda;
        }
    }
}

TEST_CASE("uniqueness of birth enforces its preconditions") {
    SUBCASE("non-adjacent Morse indices") {
        auto g = fixtures::two_arc_graphic();
        g.arcs[0].morse_index = 3;
        CHECK_THROWS_AS(apply_uniqueness_of_birth(g), PreconditionViolated);
    }
    SUBCASE("missing cancellation link") {
        auto g = fixtures::two_arc_graphic();
        g.arcs[0].cancels_with.reset();
        CHECK_THROWS_AS(apply_uniqueness_of_birth(g), PreconditionViolated);
    }
    SUBCASE("arcs must span all of Lambda") {
        auto g = fixtures::two_arc_graphic();
        g.arcs[1].lambda_interval = {0.0, 0.5};
        CHECK_THROWS_AS(apply_uniqueness_of_birth(g), PreconditionViolated);
    }
}

TEST_CASE("simplify_to_single_death keeps only the opening death") {
    auto g = fixtures::death_birth_death_graphic();
    auto out = simplify_to_single_death(g);

    REQUIRE(out.events.size() == 1);
    CHECK(out.events[0].kind == EventKind::CubicDeath);
    CHECK(out.events[0].lambda == doctest::Approx(1.0 / 3.0));
    CHECK(out.arcs_alive_at(1.0).empty());
    CHECK(out.arcs_alive_at(0.6).empty());

    SUBCASE("the left endpoint fiber is unchanged") {
        auto in0 = g.arcs_alive_at(0.0), out0 = out.arcs_alive_at(0.0);
        REQUIRE(in0.size() == out0.size());
        for (size_t i = 0; i < in0.size(); ++i)
            CHECK(g.arcs[in0[i]].values.front() ==
                  out.arcs[out0[i]].values.front());
    }
    SUBCASE("idempotence") {
        auto again = simplify_to_single_death(out);
        CHECK(again.events.size() == 1);
        CHECK(again.arcs.size() == out.arcs.size());
        for (size_t a = 0; a < again.arcs.size(); ++a)
            CHECK(again.arcs[a].values == out.arcs[a].values);
    }
}

TEST_CASE("simplify_to_single_death rejects a populated right endpoint") {
    auto g = apply_uniqueness_of_birth(fixtures::two_arc_graphic());
    // arcs are reborn and live through lambda=1: not a valid input
    CHECK_THROWS_AS(simplify_to_single_death(g), PreconditionViolated);
}

TEST_CASE("the synthesized single-death graphic matches the whitney cusp") {
    auto m = unit_model(1, 0.4);
    double amplitude = 3.0;
    auto g = single_death_graphic(m, amplitude, 1, 33);
    REQUIRE(g.arcs.size() == 2);
    REQUIRE(g.events.size() == 1);
    CHECK(g.events[0].lambda == 0.4);
    CHECK(g.arcs[0].morse_index == 1);
    CHECK(g.arcs[1].morse_index == 0);
    for (size_t i = 0; i < g.arcs[0].lambda_mesh.size(); ++i) {
        double lam = g.arcs[0].lambda_mesh[i];
        auto vals = whitney_critical_values(m, lam);
        if (vals.size() == 2) {
            CHECK(g.arcs[1].values[i] == amplitude * vals[0]);
            CHECK(g.arcs[0].values[i] == amplitude * vals[1]);
        }
    }
}

TEST_CASE("graphic exports carry every arc sample and event") {
    auto g = single_death_graphic(unit_model(1), 2.0, 1, 17);
    auto table = graphic_table(g);
    size_t rows = std::count(table.begin(), table.end(), '\n') - 1;
    CHECK(rows == 2 * 17);
    auto events = event_table(g);
    CHECK(events.find("CubicDeath") != std::string::npos);
    auto svg = graphic_svg(g);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
