#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "foldcert/lyapunov.hpp"
#include "foldcert/synthesis.hpp"

using namespace foldcert;

TEST_CASE("smooth_step has exact plateaus and is monotone") {
    CHECK(smooth_step(-1.0) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(2.0) == 1.0);
    CHECK(smooth_step(1e-7) == 0.0);       // underflow keeps the plateau exact
    CHECK(smooth_step(1.0 - 1e-7) == 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        double v = smooth_step(i / 100.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("box cutoff is exactly 1 inside, exactly 0 outside") {
    BoxCutoff rho;
    rho.inner = Box{{{-0.5, 0.5}, {-0.5, 0.5}}};
    rho.outer = Box{{{-1.0, 1.0}, {-1.0, 1.0}}};
    rho.validate();
    Vec x(2);
    x << 0.3, -0.49;
    CHECK(rho.value(x) == 1.0);
    x << 1.01, 0.0;
    CHECK(rho.value(x) == 0.0);
    x << -2.0, 5.0;
    CHECK(rho.value(x) == 0.0);
    x << 0.75, 0.0;
    double v = rho.value(x);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("lambda cutoffs expose exact plateaus and disjoint supports") {
    LambdaCutoff eta{0.1, 0.25, true};
    LambdaCutoff xi{0.9, 0.75, false};
    CHECK(eta.value(0.0) == 1.0);
    CHECK(eta.value(0.1) == 1.0);
    CHECK(eta.value(0.3) == 0.0);
    CHECK(xi.value(1.0) == 1.0);
    CHECK(xi.value(0.5) == 0.0);
    CHECK_FALSE(supports_overlap(eta, xi));
    LambdaCutoff wide{0.5, 0.8, true};
    CHECK(supports_overlap(wide, xi));
}

TEST_CASE("blend collapses at the formula corners") {
    const auto& fam = fixtures::fold1d_family();
    FieldFn f = [&fam](const Vec& x, double lambda) {
        return fam.eval_F1_end(x, lambda);
    };
    Vec x = Vec::Constant(1, 0.31);

    SUBCASE("sigma = 0 reproduces the field bitwise") {
        for (double lam : {0.0, 0.33, 0.9}) {
            Vec a = blend(f, fam.lyapunov, fam.rho, x, lam, 0.0);
            Vec b = f(x, lam);
            CHECK(a == b);
        }
    }
    SUBCASE("sigma = 1 on the plateau is the negative gradient") {
        CHECK(fam.rho.value(x) == 1.0);
        Vec a = blend(f, fam.lyapunov, fam.rho, x, 0.4, 1.0);
        Vec b = -fam.lyapunov.grad_x(x, 0.4);
        CHECK((a - b).norm() == 0.0);
    }
    SUBCASE("sigma = 1/2 on the plateau averages field and gradient") {
        Vec a = blend(f, fam.lyapunov, fam.rho, x, 0.4, 0.5);
        Vec b = 0.5 * (f(x, 0.4) - fam.lyapunov.grad_x(x, 0.4));
        CHECK((a - b).norm() < 1e-15);
        // the decrease identity: <grad g, R> = (<grad g, f> - |grad g|^2)/2
        Vec gg = fam.lyapunov.grad_x(x, 0.4);
        double lhs = gg.dot(a);
        double rhs = 0.5 * (gg.dot(f(x, 0.4)) - gg.squaredNorm());
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(lhs < 0.0);
    }
}

TEST_CASE("build_lyapunov accepts a gradient reference field") {
    // constant downhill flow: the field of -grad(x), block exits on the left
    auto svf = fixtures::fold1d_data();
    auto grid = fixtures::grid1d(8, 8);
    auto block = fixtures::interval_block(grid, 0, 8, FaceRole::Exit,
                                          FaceRole::Entrance);
    BlockPair pair;
    pair.parent = block;
    pair.split_axis = 0;
    pair.split_coordinate = 0.0;
    pair.split_node = 4;
    pair.attractor = fixtures::interval_block(grid, 4, 8, FaceRole::Entrance,
                                              FaceRole::Entrance);
    pair.repeller =
        fixtures::interval_block(grid, 0, 4, FaceRole::Exit, FaceRole::Exit);

    FieldFn downhill = [](const Vec&, double) { return Vec::Constant(1, -1.0); };
    LyapunovOptions opts;
    opts.samples_per_axis = 64;
    auto lf = build_lyapunov(block, pair, downhill, opts);
    CHECK(lf.worst_margin > 0.0);
    CHECK(lf.decrease_samples.rows() > 0);
    // g < 0 near the exit, > 0 near the entrance
    CHECK(lf.value(Vec::Constant(1, -0.99), 0.5) < 0.0);
    CHECK(lf.value(Vec::Constant(1, 0.99), 0.5) > 0.0);
}

TEST_CASE("a planar center fails the decrease inequality loudly") {
    auto grid = fixtures::grid2d(16, 8);
    auto region = GridRegion::full_box(grid);
    auto block = fixtures::declared_block(region, [](const BlockFace& f) {
        return f.axis == 0 && f.side < 0 ? FaceRole::Exit : FaceRole::Entrance;
    });
    BlockPair pair;
    pair.parent = block;
    pair.split_axis = 0;
    pair.split_coordinate = 0.0;
    pair.split_node = 8;
    GridRegion left, right;
    left.grid = right.grid = grid;
    for (const auto& c : region.cells)
        (c[0] < 8 ? left : right).cells.insert(c);
    pair.repeller = fixtures::declared_block(
        left, [](const BlockFace&) { return FaceRole::Exit; });
    pair.attractor = fixtures::declared_block(
        right, [](const BlockFace&) { return FaceRole::Entrance; });

    FieldFn rotation = [](const Vec& x, double) {
        Vec v(2);
        v << -x[1], x[0];
        return v;
    };
    LyapunovOptions opts;
    opts.samples_per_axis = 48;
    opts.lambda_samples = 17;
    opts.halo_cells = 1;
    CHECK_THROWS_AS(build_lyapunov(block, pair, rotation, opts), DecreaseFailed);
}

TEST_CASE("the 1D family's lyapunov function satisfies the decrease margin") {
    const auto& fam = fixtures::fold1d_family();
    CHECK(fam.lyapunov.worst_margin > 0.0);
    CHECK(fam.lyapunov.decrease_samples.rows() >= 1000);
}

TEST_CASE("endpoint families realize the canonical morse data") {
    const auto& fam = fixtures::fold1d_family();

    SUBCASE("f0(.,1) has exactly the two canonical rest points") {
        // chart critical points: z_e = +-1, i.e. the lambda=0 equilibria
        Vec att = Vec::Constant(1, std::sqrt(0.5));
        Vec rep = Vec::Constant(1, -std::sqrt(0.5));
        CHECK(fam.f0.eval(att, 1.0).norm() < 1e-9);
        CHECK(fam.f0.eval(rep, 1.0).norm() < 1e-9);
        // stability: derivative negative at the attractor, positive at the repeller
        double h = 1e-6;
        auto d = [&](const Vec& p) {
            return (fam.f0.eval(p + Vec::Constant(1, h), 1.0)[0] -
                    fam.f0.eval(p - Vec::Constant(1, h), 1.0)[0]) /
                   (2.0 * h);
        };
        CHECK(d(att) < 0.0);
        CHECK(d(rep) > 0.0);
    }
    SUBCASE("the two critical values are distinct") {
        Vec att = Vec::Constant(1, std::sqrt(0.5));
        Vec rep = Vec::Constant(1, -std::sqrt(0.5));
        double va = fam.amplitude * whitney_value(fam.whitney, att, 0.0);
        double vr = fam.amplitude * whitney_value(fam.whitney, rep, 0.0);
        CHECK(std::abs(va - vr) > 1e-6);
        CHECK(vr > va);  // repeller value above the attractor value
    }
    SUBCASE("f1(.,1) is critical-point free on the block") {
        for (double x = -0.99; x <= 0.99; x += 0.07)
            CHECK(fam.f1.eval(Vec::Constant(1, x), 1.0).norm() > 1e-6);
    }
    SUBCASE("constant in sigma outside the cutoff support") {
        Vec outside = Vec::Constant(1, 0.99);
        CHECK(fam.rho0.value(outside) == 0.0);
        Vec a = fam.f0.eval(outside, 0.0);
        Vec b = fam.f0.eval(outside, 0.37);
        Vec c = fam.f0.eval(outside, 1.0);
        CHECK(a == b);
        CHECK(b == c);
    }
}

TEST_CASE("2D endpoint morse function has the index-0 and index-1 pair") {
    const auto& fam = fixtures::fold2d_family();
    Vec att(2), rep(2);
    att << std::sqrt(0.5), 0.0;
    rep << -std::sqrt(0.5), 0.0;
    CHECK(fam.f0.eval(att, 1.0).norm() < 1e-8);
    CHECK(fam.f0.eval(rep, 1.0).norm() < 1e-8);

    auto hessian_signs = [&](const Vec& p) {
        // eigen signs of the jacobian of f0(.,1) = -grad g0
        double h = 1e-5;
        Eigen::MatrixXd J(2, 2);
        for (int j = 0; j < 2; ++j) {
            Vec dp = Vec::Zero(2);
            dp[j] = h;
            J.col(j) = (fam.f0.eval(p + dp, 1.0) - fam.f0.eval(p - dp, 1.0)) /
                       (2.0 * h);
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(J);
        int unstable = 0;
        for (int i = 0; i < 2; ++i)
            if (es.eigenvalues()[i].real() > 0.0) ++unstable;
        return unstable;
    };
    CHECK(hessian_signs(att) == 0);  // index k-1 = 0
    CHECK(hessian_signs(rep) == 1);  // index k = 1
}

TEST_CASE("stage F1 matches its endpoint contracts") {
    const auto& fam = fixtures::fold1d_family();
    Vec x = Vec::Constant(1, 0.21);

    SUBCASE("lambda = 0 collapses to f0") {
        for (double s : {0.0, 0.5, 1.0})
            CHECK(fam.eval_F1(x, 0.0, s) == fam.f0.eval(x, s));
    }
    SUBCASE("mid-lambda is the reference field for every sigma") {
        for (double s : {0.0, 0.5, 1.0})
            CHECK(fam.eval_F1(x, 0.5, s) == fam.base(x, 0.5));
    }
    SUBCASE("sigma = 0 is the reference field everywhere, deviation exactly 0") {
        for (double xx = -1.0; xx <= 1.0; xx += 0.1)
            for (double lam = 0.0; lam <= 1.0; lam += 0.1) {
                Vec p = Vec::Constant(1, xx);
                CHECK((fam.eval_F1(p, lam, 0.0) - fam.base(p, lam)).norm() == 0.0);
            }
    }
}

TEST_CASE("overlapping lambda cutoffs are rejected") {
    SynthesisOptions opts;
    opts.eta_support = 0.8;  // overlaps xi's support [0.75, 1]
    CHECK_THROWS_AS(synthesize_family(make_field("fold1d", {0.5}),
                                      fixtures::fold1d_data(),
                                      fixtures::fold1d_pair(), 1, opts),
                    OverlappingCutoffs);
}

TEST_CASE("the composed family satisfies the support and junction invariants") {
    const auto& fam = fixtures::fold1d_family();
    auto checks = check_family(fam);
    CHECK(checks.sigma0_deviation == 0.0);
    CHECK(checks.outside_deviation == 0.0);
    CHECK(checks.junction_deviation == 0.0);
    CHECK(checks.outside_sample_count > 0);
    CHECK(checks.boundary_sign_worst_margin > 0.0);
}

TEST_CASE("a tampered graphic is rejected as inconsistent") {
    SynthesizedFamily fam = fixtures::fold1d_family();
    fam.graphic.events[0].lambda = 0.7;  // no longer the model's death
    CHECK_THROWS_AS(check_family(fam), InconsistentGraphic);
    fam = fixtures::fold1d_family();
    fam.graphic.arcs[0].morse_index = 3;
    CHECK_THROWS_AS(check_family(fam), InconsistentGraphic);
}

TEST_CASE("the final field beyond the fold has no rest points in the core") {
    const auto& fam = fixtures::fold1d_family();
    // lambda past the death event: -grad of the whitney family never vanishes
    for (double x = -0.75; x <= 0.75; x += 0.05) {
        Vec p = Vec::Constant(1, x);
        CHECK(fam.eval(p, 0.8, 1.0).norm() > 1e-4);
    }
    // at the fold, the core field vanishes at the chart origin only
    Vec origin = fam.whitney.chart_center;
    CHECK(fam.eval(origin, fam.whitney.lambda0, 1.0).norm() < 1e-12);
}

TEST_CASE("the smoothing stencil preserves pinned nodes and linear profiles") {
    GridScalarField g;
    g.domain = Box{{{0.0, 1.0}}};
    g.res = {8};
    g.values.resize(9);
    for (int i = 0; i <= 8; ++i) g.values[i] = 0.25 * i;  // linear ramp
    std::vector<char> pinned(9, 0);
    pinned[0] = pinned[8] = 1;

    auto linear = g.values;
    g.smooth(3, pinned);
    for (int i = 0; i <= 8; ++i)
        CHECK(g.values[i] == doctest::Approx(linear[i]).epsilon(1e-14));

    // a spike decays but the pinned ends hold their levels
    g.values[4] += 1.0;
    double end0 = g.values[0], end8 = g.values[8];
    g.smooth(2, pinned);
    CHECK(g.values[0] == end0);
    CHECK(g.values[8] == end8);
    CHECK(g.values[4] < linear[4] + 1.0);
}

TEST_CASE("grid-interpolated gradients track the whitney values to second order") {
    // sample whitney_value on a grid and compare interpolated gradients with
    // central differences of the closed form
    WhitneyModel m;
    m.lambda0 = 0.5;
    m.sign = +1;
    m.g0 = 0.0;
    m.q_plus = 0;
    m.q_minus = 0;
    m.chart_center = Vec::Zero(1);
    m.chart_map = Eigen::MatrixXd::Identity(1, 1);
    m.chart_domain = Box{{{-2.0, 2.0}}};
    m.validate();

    GridScalarField g;
    g.domain = Box{{{-2.0, 2.0}, {0.0, 1.0}}};
    g.res = {64, 16};
    g.values.resize(g.node_count());
    std::vector<int> idx(2, 0);
    while (true) {
        Vec p(1);
        p[0] = -2.0 + 4.0 * idx[0] / 64.0;
        double lam = idx[1] / 16.0;
        g.values[g.node_index(idx)] = whitney_value(m, p, lam);
        int c = 0;
        while (c < 2) {
            if (++idx[c] <= g.res[c]) break;
            idx[c] = 0;
            ++c;
        }
        if (c == 2) break;
    }
    g.compute_gradients();

    double h = 4.0 / 64.0;
    double tol = 10.0 * h * h;
    for (double x = -1.5; x <= 1.5; x += 0.23) {
        for (double lam : {0.1, 0.5, 0.9}) {
            Vec p(2);
            p << x, lam;
            double interp = g.gradient(p)[0];
            Vec xp = Vec::Constant(1, x + h), xm = Vec::Constant(1, x - h);
            double fd = (whitney_value(m, xp, lam) - whitney_value(m, xm, lam)) /
                        (2.0 * h);
            CHECK(std::abs(interp - fd) <= tol);
        }
    }
}

TEST_CASE("family artifacts re-evaluate bit-identically") {
    const auto& fam = fixtures::fold1d_family();
    auto text = serialize_family(fam);
    auto again = parse_family(text);
    CHECK(serialize_family(again) == text);

    for (double x = -1.2; x <= 1.2; x += 0.13) {
        for (double lam : {0.0, 0.3, 0.5, 0.77, 1.0}) {
            for (double s : {0.0, 0.21, 1.0 / 3.0, 0.5, 0.9, 1.0}) {
                Vec p = Vec::Constant(1, x);
                Vec a = fam.eval(p, lam, s);
                Vec b = again.eval(p, lam, s);
                CHECK(a == b);
            }
        }
    }
}
