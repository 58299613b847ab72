#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "foldcert/homology.hpp"
#include "foldcert/sign_certificates.hpp"

namespace foldcert {

// Union of grid cells in phase space, the carrier of a candidate block
// B = region x [0,1].  Cells are multi-indices into the phase grid.
struct GridRegion {
    Grid grid;
    std::set<std::vector<int>> cells;

    int dim() const { return grid.phase_dim(); }
    bool empty() const { return cells.empty(); }

    static GridRegion full_box(const Grid& grid);
    static GridRegion cell_range(const Grid& grid, const std::vector<int>& lo,
                                 const std::vector<int>& hi);  // half-open ranges

    Box bounding_box() const;
    Vec cell_center(const std::vector<int>& cell) const;

    // Cubical realization (top cells plus closure) in node coordinates.
    CubicalSet realize() const;
};

enum class FaceRole { Entrance, Exit, Tangency };

std::string to_string(FaceRole r);

// Maximal group of coplanar boundary cell-faces of the region: the unit the
// sign certificate quantifies over.
struct BlockFace {
    int axis = 0;
    int side = +1;            // outward normal = side * e_axis
    int node_index = 0;       // grid node index of the hyperplane
    double coordinate = 0.0;
    std::vector<std::vector<int>> member_cells;  // cells owning a face here
    Interval lambda_range{0.0, 1.0};
    FaceRole role = FaceRole::Tangency;
    SignCertificate cert;
    bool flow_through_assumed = false;  // tangency faces: recorded, not verified

    Vec outward_normal(int dim) const;
    std::string describe() const;
    CubicalSet realize(const Grid& grid) const;
};

struct IsolatingBlock {
    GridRegion region;
    std::vector<BlockFace> faces;

    std::vector<const BlockFace*> faces_with_role(FaceRole r) const;
    CubicalSet exit_set() const;
    CubicalSet entrance_set() const;
    void validate() const;
};

struct BlockPair {
    IsolatingBlock parent;
    IsolatingBlock attractor;   // B_A
    IsolatingBlock repeller;    // B_A*
    int split_axis = 0;
    int split_node = 0;
    double split_coordinate = 0.0;
};

enum class TangencyPolicy { Forbid, Allow };

// Certify the entrance/exit decomposition of the region's boundary from the
// sampled field.  `spacing` <= 0: per-face covering radius from the data.
IsolatingBlock classify_boundary(const SampledVectorField& svf, const GridRegion& region,
                                 double spacing, TangencyPolicy policy);

// Split along a grid hyperplane whose interface carries a certified sign at
// lambda = 0.  Positive flux along +axis places the repeller below and the
// attractor above; negative flux mirrors.
BlockPair split_simple_block(const SampledVectorField& svf, const IsolatingBlock& block,
                             int split_axis, double split_coordinate,
                             double spacing = 0.0);

struct SimpleBlockReport {
    struct Entry {
        std::string name;
        bool empty_set = false;
        bool full_boundary = false;  // whole boundary sphere: exempt from H1 check
        bool connected = false;
        int betti1 = 0;
        bool pass = false;
    };
    std::vector<Entry> entries;
    bool pass = false;
};

// Connectivity + vanishing H1 for B0, B_A, B_A* and their entrance/exit
// sets.  Entrance/exit sets need only H1 = 0 (multiple components allowed);
// a set equal to the full boundary of its block is exempt.
SimpleBlockReport validate_simple_block(const BlockPair& pair);

// H_*(B, exit set) — the homology Conley index carried by the block.
HomologyResult conley_index_of_block(const IsolatingBlock& block);

}  // namespace foldcert
