#pragma once

// Shared builders for the test suites: the 1D/2D fold datasets, certified
// block pairs, synthesized families, and the Cerf graphic fixtures.

#include <functional>
#include <map>
#include <tuple>

#include "foldcert/cerf.hpp"
#include "foldcert/conley.hpp"
#include "foldcert/field.hpp"
#include "foldcert/synthesis.hpp"

namespace fixtures {

using namespace foldcert;

inline SampledVectorField fold1d_data() {
    Field f = make_field("fold1d", {0.5});
    Box box{{{-1.0, 1.0}}};
    Vec b = Vec::Zero(1);
    return sample_block_data(f, box, 2.5, 1, 41, 41, b);
}

inline SampledVectorField fold2d_data() {
    Field f = make_field("fold2d", {0.5, 1.0});
    Box box{{{-1.0, 1.0}, {-1.0, 1.0}}};
    Vec b = Vec::Zero(2);
    return sample_block_data(f, box, 2.5, 17, 17, 17, b);
}

// Two rows of 6 arrows at the a- and c-levels plus one at (b, 0).
inline SampledVectorField thirteen_arrow_data(double lipschitz = 1.2) {
    Field f = make_field("fold1d", {0.5});
    SampledVectorField svf;
    svf.dim = 1;
    svf.lipschitz_bound = lipschitz;
    auto push = [&](double x, double lambda) {
        SampledVectorField::Sample s;
        s.x = Vec::Constant(1, x);
        s.lambda = lambda;
        s.f = f(s.x, lambda);
        svf.samples.push_back(std::move(s));
    };
    for (int i = 0; i <= 5; ++i) push(-1.0, i / 5.0);
    for (int i = 0; i <= 5; ++i) push(1.0, i / 5.0);
    push(0.0, 0.0);
    svf.validate();
    return svf;
}

inline Grid grid1d(int res = 16, int lambda_res = 16) {
    Grid g;
    g.phase_box = Box{{{-1.0, 1.0}}};
    g.resolution = {res};
    g.lambda_resolution = lambda_res;
    return g;
}

inline Grid grid2d(int res = 12, int lambda_res = 8) {
    Grid g;
    g.phase_box = Box{{{-1.0, 1.0}, {-1.0, 1.0}}};
    g.resolution = {res, res};
    g.lambda_resolution = lambda_res;
    return g;
}

inline BlockPair fold1d_pair() {
    auto svf = fold1d_data();
    auto region = GridRegion::full_box(grid1d());
    auto block = classify_boundary(svf, region, 0.0, TangencyPolicy::Forbid);
    return split_simple_block(svf, block, 0, 0.0);
}

inline BlockPair fold2d_pair() {
    auto svf = fold2d_data();
    auto region = GridRegion::full_box(grid2d());
    auto block = classify_boundary(svf, region, 0.0, TangencyPolicy::Forbid);
    return split_simple_block(svf, block, 0, 0.0);
}

inline const SynthesizedFamily& fold1d_family() {
    static SynthesizedFamily fam = [] {
        return synthesize_family(make_field("fold1d", {0.5}), fold1d_data(),
                                 fold1d_pair(), 1);
    }();
    return fam;
}

inline const SynthesizedFamily& fold2d_family() {
    static SynthesizedFamily fam = [] {
        return synthesize_family(make_field("fold2d", {0.5, 1.0}), fold2d_data(),
                                 fold2d_pair(), 1);
    }();
    return fam;
}

// A block fabricated from declared roles (no sampling); used by homology and
// validation tests.
inline IsolatingBlock declared_block(
    const GridRegion& region,
    const std::function<FaceRole(const BlockFace&)>& role_of) {
    IsolatingBlock b;
    b.region = region;
    // enumerate boundary cell-faces directly and fabricate certificates
    std::map<std::tuple<int, int, int>, BlockFace> groups;
    int n = region.dim();
    for (const auto& cell : region.cells) {
        for (int axis = 0; axis < n; ++axis) {
            for (int side : {-1, +1}) {
                std::vector<int> nbr = cell;
                nbr[axis] += side;
                if (region.cells.count(nbr)) continue;
                int node = side > 0 ? cell[axis] + 1 : cell[axis];
                auto key = std::make_tuple(axis, node, side);
                auto it = groups.find(key);
                if (it == groups.end()) {
                    BlockFace f;
                    f.axis = axis;
                    f.side = side;
                    f.node_index = node;
                    f.coordinate = region.grid.node_coord(axis, node);
                    it = groups.emplace(key, std::move(f)).first;
                }
                it->second.member_cells.push_back(cell);
            }
        }
    }
    for (auto& [k, f] : groups) {
        std::sort(f.member_cells.begin(), f.member_cells.end());
        f.role = role_of(f);
        f.cert.face = f.describe();
        f.cert.quantity = "declared";
        f.cert.sample_count = 1;
        if (f.role == FaceRole::Exit) {
            f.cert.sign = Sign::Positive;
            f.cert.margin = 1.0;
        } else if (f.role == FaceRole::Entrance) {
            f.cert.sign = Sign::Negative;
            f.cert.margin = 1.0;
        } else {
            f.cert.sign = Sign::Undetermined;
            f.cert.margin = 0.0;
            f.flow_through_assumed = true;
        }
        b.faces.push_back(std::move(f));
    }
    return b;
}

// 1D interval block [lo_cell, hi_cell) with given end roles.
inline IsolatingBlock interval_block(const Grid& grid, int lo, int hi, FaceRole left,
                                     FaceRole right) {
    auto region = GridRegion::cell_range(grid, {lo}, {hi});
    return declared_block(region, [&](const BlockFace& f) {
        return f.side < 0 ? left : right;
    });
}

// Two event-free canceling arcs spanning Lambda.
inline CerfGraphic two_arc_graphic(int upper_index = 1) {
    CerfGraphic g;
    CerfArc p, q;
    p.lambda_interval = q.lambda_interval = {0.0, 1.0};
    for (int i = 0; i <= 32; ++i) {
        double lam = i / 32.0;
        p.lambda_mesh.push_back(lam);
        q.lambda_mesh.push_back(lam);
        p.values.push_back(0.7 - 0.1 * lam);
        q.values.push_back(0.3 + 0.05 * lam);
    }
    p.morse_index = upper_index;
    q.morse_index = upper_index - 1;
    p.cancels_with = 1;
    q.cancels_with = 0;
    g.arcs = {p, q};
    return g;
}

// Death at 1/3, birth at 1/2, closing death at 2/3: a death-then-birth
// graphic whose right endpoint fiber is empty.
inline CerfGraphic death_birth_death_graphic() {
    CerfGraphic g;
    auto arc = [](double lo, double hi, double v0, double v1, int index,
                  int cancels) {
        CerfArc a;
        a.lambda_interval = {lo, hi};
        for (int i = 0; i <= 16; ++i) {
            double t = i / 16.0;
            a.lambda_mesh.push_back(lo + (hi - lo) * t);
            a.values.push_back(v0 + (v1 - v0) * t);
        }
        a.morse_index = index;
        a.cancels_with = cancels;
        return a;
    };
    g.arcs.push_back(arc(0.0, 1.0 / 3.0, 0.7, 0.5, 1, 1));   // p left
    g.arcs.push_back(arc(0.0, 1.0 / 3.0, 0.3, 0.5, 0, 0));   // q left
    g.arcs.push_back(arc(0.5, 2.0 / 3.0, 0.5, 0.55, 1, 3));  // born pair
    g.arcs.push_back(arc(0.5, 2.0 / 3.0, 0.5, 0.55, 0, 2));
    // keep the born arcs' values equal at both events, apart in between
    for (size_t i = 0; i < g.arcs[2].values.size(); ++i) {
        double t = i / 16.0;
        double bump = 0.1 * t * (1.0 - t);
        g.arcs[2].values[i] = 0.5 + bump;
        g.arcs[3].values[i] = 0.5 - bump;
    }
    g.events.push_back({1.0 / 3.0, EventKind::CubicDeath, {0, 1}});
    g.events.push_back({0.5, EventKind::CubicBirth, {2, 3}});
    g.events.push_back({2.0 / 3.0, EventKind::CubicDeath, {2, 3}});
    return g;
}

}  // namespace fixtures
