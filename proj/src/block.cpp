#include "foldcert/block.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

namespace foldcert {

std::string to_string(FaceRole r) {
    switch (r) {
        case FaceRole::Entrance: return "entrance";
        case FaceRole::Exit: return "exit";
        default: return "tangency";
    }
}

GridRegion GridRegion::full_box(const Grid& grid) {
    std::vector<int> lo(grid.phase_dim(), 0);
    std::vector<int> hi(grid.resolution.begin(), grid.resolution.end());
    return cell_range(grid, lo, hi);
}

GridRegion GridRegion::cell_range(const Grid& grid, const std::vector<int>& lo,
                                  const std::vector<int>& hi) {
    grid.validate();
    GridRegion r;
    r.grid = grid;
    int n = grid.phase_dim();
    std::vector<int> idx = lo;
    while (true) {
        bool in = true;
        for (int i = 0; i < n; ++i)
            if (idx[i] >= hi[i]) in = false;
        if (in) r.cells.insert(idx);
        int c = 0;
        while (c < n) {
            if (++idx[c] < hi[c]) break;
            idx[c] = lo[c];
            ++c;
        }
        if (c == n) break;
    }
    return r;
}

Box GridRegion::bounding_box() const {
    int n = dim();
    Box b;
    b.iv.resize(n);
    bool first = true;
    for (const auto& cell : cells) {
        for (int i = 0; i < n; ++i) {
            double lo = grid.node_coord(i, cell[i]);
            double hi = grid.node_coord(i, cell[i] + 1);
            if (first) {
                b.iv[i] = {lo, hi};
            } else {
                b.iv[i].lo = std::min(b.iv[i].lo, lo);
                b.iv[i].hi = std::max(b.iv[i].hi, hi);
            }
        }
        first = false;
    }
    return b;
}

Vec GridRegion::cell_center(const std::vector<int>& cell) const {
    Vec c(dim());
    for (int i = 0; i < dim(); ++i)
        c[i] = grid.node_coord(i, cell[i]) + 0.5 * grid.phase_step(i);
    return c;
}

CubicalSet GridRegion::realize() const {
    CubicalSet cs(dim());
    for (const auto& cell : cells) {
        Cube c;
        c.base.assign(cell.begin(), cell.end());
        c.extent = (1u << dim()) - 1u;
        cs.insert_closed(c);
    }
    return cs;
}

Vec BlockFace::outward_normal(int dim) const {
    Vec n = Vec::Zero(dim);
    n[axis] = side;
    return n;
}

std::string BlockFace::describe() const {
    std::ostringstream os;
    os << "x" << axis << "=" << coordinate << (side > 0 ? " (upper)" : " (lower)");
    return os.str();
}

CubicalSet BlockFace::realize(const Grid& grid) const {
    int n = grid.phase_dim();
    CubicalSet cs(n);
    for (const auto& cell : member_cells) {
        Cube c;
        c.base.assign(cell.begin(), cell.end());
        c.base[axis] = side > 0 ? cell[axis] + 1 : cell[axis];
        c.extent = 0;
        for (int i = 0; i < n; ++i)
            if (i != axis) c.extent |= 1u << i;
        cs.insert_closed(c);
    }
    return cs;
}

std::vector<const BlockFace*> IsolatingBlock::faces_with_role(FaceRole r) const {
    std::vector<const BlockFace*> out;
    for (const auto& f : faces)
        if (f.role == r) out.push_back(&f);
    return out;
}

CubicalSet IsolatingBlock::exit_set() const {
    CubicalSet cs(region.dim());
    for (const auto& f : faces)
        if (f.role == FaceRole::Exit)
            for (const auto& c : f.realize(region.grid).cells) cs.cells.insert(c);
    return cs;
}

CubicalSet IsolatingBlock::entrance_set() const {
    CubicalSet cs(region.dim());
    for (const auto& f : faces)
        if (f.role == FaceRole::Entrance)
            for (const auto& c : f.realize(region.grid).cells) cs.cells.insert(c);
    return cs;
}

void IsolatingBlock::validate() const {
    for (const auto& f : faces) {
        if (f.role == FaceRole::Entrance &&
            !(f.cert.sign == Sign::Negative && f.cert.margin > 0.0))
            throw NotABlock("entrance face without negative-flux certificate: " +
                            f.describe());
        if (f.role == FaceRole::Exit &&
            !(f.cert.sign == Sign::Positive && f.cert.margin > 0.0))
            throw NotABlock("exit face without positive-flux certificate: " +
                            f.describe());
    }
}

namespace {

// Boundary cell-faces grouped by (axis, hyperplane node, side).
std::vector<BlockFace> boundary_face_groups(const GridRegion& region) {
    int n = region.dim();
    std::map<std::tuple<int, int, int>, BlockFace> groups;
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
    std::vector<BlockFace> out;
    for (auto& [k, f] : groups) {
        std::sort(f.member_cells.begin(), f.member_cells.end());
        out.push_back(std::move(f));
    }
    return out;
}

// Continuous region covered by a face group, as a FaceRegion for sampling.
FaceRegion face_region_of(const GridRegion& region, const BlockFace& f,
                          const Interval& lambda_range) {
    int n = region.dim();
    FaceRegion fr;
    fr.phase_dim = n;
    fr.pinned_axis = f.axis;
    fr.pinned_value = f.coordinate;
    fr.lambda_range = lambda_range;
    fr.phase_ranges.iv.resize(n);
    bool first = true;
    for (const auto& cell : f.member_cells) {
        for (int i = 0; i < n; ++i) {
            if (i == f.axis) continue;
            double lo = region.grid.node_coord(i, cell[i]);
            double hi = region.grid.node_coord(i, cell[i] + 1);
            if (first) {
                fr.phase_ranges.iv[i] = {lo, hi};
            } else {
                fr.phase_ranges.iv[i].lo = std::min(fr.phase_ranges.iv[i].lo, lo);
                fr.phase_ranges.iv[i].hi = std::max(fr.phase_ranges.iv[i].hi, hi);
            }
        }
        first = false;
    }
    fr.phase_ranges.iv[f.axis] = {f.coordinate, f.coordinate};
    return fr;
}

bool faces_adjacent(const BlockFace& a, const BlockFace& b) {
    // share a cell, or members are neighboring cells
    for (const auto& ca : a.member_cells)
        for (const auto& cb : b.member_cells) {
            int manhattan = 0;
            for (size_t i = 0; i < ca.size(); ++i) manhattan += std::abs(ca[i] - cb[i]);
            if (manhattan <= 1) return true;
        }
    return false;
}

}  // namespace

IsolatingBlock classify_boundary(const SampledVectorField& svf, const GridRegion& region,
                                 double spacing, TangencyPolicy policy) {
    if (region.empty()) throw NotABlock("empty region");
    IsolatingBlock block;
    block.region = region;
    block.faces = boundary_face_groups(region);

    for (auto& f : block.faces) {
        FaceRegion fr = face_region_of(region, f, {0.0, 1.0});
        double h = spacing > 0.0 ? spacing : covering_radius(svf, fr);
        f.cert = certify_face_sign(svf, fr, FaceQuantity::along(f.outward_normal(region.dim())), h);
        f.lambda_range = {0.0, 1.0};
        if (f.cert.sign == Sign::Positive)
            f.role = FaceRole::Exit;
        else if (f.cert.sign == Sign::Negative)
            f.role = FaceRole::Entrance;
        else
            f.role = FaceRole::Tangency;
    }

    for (auto& f : block.faces) {
        if (f.role != FaceRole::Tangency) continue;
        if (policy == TangencyPolicy::Forbid)
            throw NotABlock("face " + f.describe() +
                            " has undetermined flux sign and tangency is not permitted");
        bool near_entrance = false, near_exit = false;
        for (const auto& g : block.faces) {
            if (&g == &f) continue;
            if (g.role == FaceRole::Entrance && faces_adjacent(f, g)) near_entrance = true;
            if (g.role == FaceRole::Exit && faces_adjacent(f, g)) near_exit = true;
        }
        if (!near_entrance || !near_exit)
            throw NotABlock("face " + f.describe() +
                            " cannot be a legal tangency: not flanked by entrance and exit");
        f.flow_through_assumed = true;
    }

    block.validate();
    return block;
}

BlockPair split_simple_block(const SampledVectorField& svf, const IsolatingBlock& block,
                             int split_axis, double split_coordinate, double spacing) {
    const Grid& grid = block.region.grid;
    int n = block.region.dim();
    if (split_axis < 0 || split_axis >= n) throw ConfigInvalid("split axis out of range");

    double step = grid.phase_step(split_axis);
    double rel = (split_coordinate - grid.phase_box.iv[split_axis].lo) / step;
    int node = static_cast<int>(std::lround(rel));
    if (std::abs(rel - node) > 1e-9)
        throw ConfigInvalid("split coordinate is not aligned with the grid");
    if (node <= 0 || node >= grid.resolution[split_axis])
        throw BadInterface("split hyperplane does not separate the region");

    GridRegion lower, upper;
    lower.grid = upper.grid = grid;
    for (const auto& cell : block.region.cells) {
        if (cell[split_axis] < node)
            lower.cells.insert(cell);
        else
            upper.cells.insert(cell);
    }
    if (lower.empty() || upper.empty())
        throw BadInterface("split hyperplane does not separate the region");

    // Interface certificate at lambda = 0.
    BlockFace interface_face;
    interface_face.axis = split_axis;
    interface_face.side = +1;
    interface_face.node_index = node;
    interface_face.coordinate = split_coordinate;
    for (const auto& cell : lower.cells) {
        std::vector<int> nbr = cell;
        nbr[split_axis] += 1;
        if (upper.cells.count(nbr)) interface_face.member_cells.push_back(cell);
    }
    if (interface_face.member_cells.empty())
        throw BadInterface("no interface cells between the two halves");
    std::sort(interface_face.member_cells.begin(), interface_face.member_cells.end());

    FaceRegion fr = face_region_of(block.region, interface_face, {0.0, 0.0});
    Vec axis_dir = Vec::Zero(n);
    axis_dir[split_axis] = 1.0;
    double h = spacing > 0.0 ? spacing : covering_radius(svf, fr);
    SignCertificate cert = certify_face_sign(svf, fr, FaceQuantity::along(axis_dir), h);
    if (!cert.determinate())
        throw BadInterface("interface flux sign undetermined at lambda=0 (margin " +
                           format_real(cert.margin) + ")");

    // Positive flux along +axis: flow crosses from the lower half into the
    // upper half, so the repeller sits below and the attractor above.
    bool attractor_above = cert.sign == Sign::Positive;
    const GridRegion& att_region = attractor_above ? upper : lower;
    const GridRegion& rep_region = attractor_above ? lower : upper;

    auto inherit_faces = [&](const GridRegion& region) {
        IsolatingBlock sub;
        sub.region = region;
        sub.faces = boundary_face_groups(region);
        for (auto& f : sub.faces) {
            bool is_interface =
                f.axis == split_axis && f.node_index == node;
            if (is_interface) {
                bool outward_up = f.side > 0;
                // flux along +axis is `cert.sign`; outward flux flips with side
                Sign outward = cert.sign;
                if (!outward_up)
                    outward = cert.sign == Sign::Positive ? Sign::Negative : Sign::Positive;
                f.cert = cert;
                f.cert.sign = outward;
                f.cert.face = f.describe() + " @ lambda=0";
                f.lambda_range = {0.0, 0.0};
                f.role = outward == Sign::Positive ? FaceRole::Exit : FaceRole::Entrance;
            } else {
                // inherited outer face: find the parent certificate
                const BlockFace* parent = nullptr;
                for (const auto& pf : block.faces)
                    if (pf.axis == f.axis && pf.side == f.side &&
                        pf.node_index == f.node_index)
                        parent = &pf;
                if (!parent)
                    throw NotABlock("sub-block face missing in parent: " + f.describe());
                f.cert = parent->cert;
                f.role = parent->role;
                f.lambda_range = parent->lambda_range;
                f.flow_through_assumed = parent->flow_through_assumed;
            }
        }
        sub.validate();
        return sub;
    };

    BlockPair pair;
    pair.parent = block;
    pair.attractor = inherit_faces(att_region);
    pair.repeller = inherit_faces(rep_region);
    pair.split_axis = split_axis;
    pair.split_node = node;
    pair.split_coordinate = split_coordinate;
    return pair;
}

namespace {

SimpleBlockReport::Entry check_region(const std::string& name, const CubicalSet& cs) {
    SimpleBlockReport::Entry e;
    e.name = name;
    if (cs.empty()) {
        e.empty_set = true;
        e.connected = true;
        e.pass = true;
        return e;
    }
    HomologyResult h = relative_homology(cs, CubicalSet(cs.ambient_dim));
    e.connected = h.betti.size() > 0 && h.betti[0] == 1;
    e.betti1 = h.betti.size() > 1 ? h.betti[1] : 0;
    e.pass = e.connected && e.betti1 == 0;
    return e;
}

SimpleBlockReport::Entry check_face_set(const std::string& name, const CubicalSet& cs,
                                        const CubicalSet& full_boundary) {
    SimpleBlockReport::Entry e;
    e.name = name;
    if (cs.empty()) {
        e.empty_set = true;
        e.connected = true;
        e.pass = true;
        return e;
    }
    if (cs.cells == full_boundary.cells) {
        // Whole boundary sphere of the block; accepted by construction.
        e.full_boundary = true;
        e.connected = true;
        e.pass = true;
        return e;
    }
    HomologyResult h = relative_homology(cs, CubicalSet(cs.ambient_dim));
    e.connected = h.betti.size() > 0 && h.betti[0] == 1;
    e.betti1 = h.betti.size() > 1 ? h.betti[1] : 0;
    e.pass = e.betti1 == 0;  // components are allowed for face sets
    return e;
}

CubicalSet full_boundary_of(const IsolatingBlock& b) {
    CubicalSet cs(b.region.dim());
    for (const auto& f : b.faces)
        for (const auto& c : f.realize(b.region.grid).cells) cs.cells.insert(c);
    return cs;
}

}  // namespace

SimpleBlockReport validate_simple_block(const BlockPair& pair) {
    SimpleBlockReport rep;
    auto add_block = [&](const std::string& name, const IsolatingBlock& b) {
        rep.entries.push_back(check_region(name, b.region.realize()));
        CubicalSet boundary = full_boundary_of(b);
        rep.entries.push_back(
            check_face_set(name + " entrance", b.entrance_set(), boundary));
        rep.entries.push_back(check_face_set(name + " exit", b.exit_set(), boundary));
    };
    add_block("B0", pair.parent);
    add_block("B_A", pair.attractor);
    add_block("B_A*", pair.repeller);
    rep.pass = true;
    for (const auto& e : rep.entries) rep.pass = rep.pass && e.pass;
    return rep;
}

HomologyResult conley_index_of_block(const IsolatingBlock& block) {
    block.validate();
    CubicalSet N = block.region.realize();
    CubicalSet L = block.exit_set();
    return relative_homology(N, L);
}

}  // namespace foldcert
