#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "foldcert/homology.hpp"
#include "oracle_homology.hpp"

using namespace foldcert;

namespace {

Cube cube(std::vector<int32_t> base, std::initializer_list<int> spans) {
    Cube c;
    c.base = std::move(base);
    for (int a : spans) c.extent |= 1u << a;
    return c;
}

CubicalSet point(int dim = 1) {
    CubicalSet cs(dim);
    cs.insert_closed(cube(std::vector<int32_t>(dim, 0), {}));
    return cs;
}

CubicalSet interval_1d(int lo, int hi) {  // cells [lo, hi)
    CubicalSet cs(1);
    for (int i = lo; i < hi; ++i) cs.insert_closed(cube({i}, {0}));
    return cs;
}

CubicalSet vertices_1d(std::initializer_list<int> xs) {
    CubicalSet cs(1);
    for (int x : xs) cs.insert_closed(cube({x}, {}));
    return cs;
}

CubicalSet square_2d() {
    CubicalSet cs(2);
    cs.insert_closed(cube({0, 0}, {0, 1}));
    return cs;
}

}  // namespace

TEST_CASE("boundary matrix of a lone vertex has no columns") {
    auto cs = point();
    IntMat d1 = boundary_matrix(cs, 1);
    CHECK(d1.rows == 1);
    CHECK(d1.cols == 0);
}

TEST_CASE("boundary of a unit interval is the signed vertex pair") {
    auto cs = interval_1d(0, 1);
    IntMat d1 = boundary_matrix(cs, 1);
    REQUIRE(d1.rows == 2);
    REQUIRE(d1.cols == 1);
    // lexicographic vertex order: [0] then [1]
    CHECK(d1.at(0, 0) == -1);
    CHECK(d1.at(1, 0) == 1);
}

TEST_CASE("square boundary column squares to zero") {
    auto cs = square_2d();
    IntMat d2 = boundary_matrix(cs, 2);
    IntMat d1 = boundary_matrix(cs, 1);
    REQUIRE(d2.cols == 1);
    REQUIRE(d2.rows == 4);
    long long sum_abs = 0, sum = 0;
    for (int i = 0; i < 4; ++i) {
        sum_abs += std::llabs(d2.at(i, 0));
        sum += d2.at(i, 0);
    }
    CHECK(sum_abs == 4);
    CHECK(sum == 0);
    CHECK(is_zero_product(d1, d2));
}

TEST_CASE("boundary of boundary vanishes on random cubical sets") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 20; ++trial) {
        CubicalSet cs(3);
        std::uniform_int_distribution<int> coord(0, 3), axes(0, 2);
        for (int c = 0; c < 12; ++c) {
            Cube q;
            q.base = {coord(rng), coord(rng), coord(rng)};
            int na = axes(rng);
            for (int a = 0; a <= na; ++a) q.extent |= 1u << axes(rng);
            cs.insert_closed(q);
        }
        auto cc = relative_chain_complex(cs, CubicalSet(3));
        CHECK(cc.boundary_squares_to_zero());
    }
}

TEST_CASE("relative homology fixtures match the reduction oracle exactly") {
    struct Fixture {
        const char* name;
        CubicalSet N, L;
        std::vector<int> betti;
    };
    std::vector<Fixture> fixtures;
    fixtures.push_back({"point", point(), CubicalSet(1), {1, 0}});
    fixtures.push_back(
        {"interval mod one end", interval_1d(0, 4), vertices_1d({0}), {0, 0}});
    fixtures.push_back(
        {"interval mod both ends", interval_1d(0, 4), vertices_1d({0, 4}), {0, 1}});
    {
        CubicalSet L(2);
        L.insert_closed(cube({0, 0}, {1}));  // one edge of the square
        fixtures.push_back({"square mod one edge", square_2d(), L, {0, 0, 0}});
    }
    fixtures.push_back(
        {"attractor interval", interval_1d(2, 4), CubicalSet(1), {1, 0}});

    for (auto& fx : fixtures) {
        CAPTURE(fx.name);
        HomologyResult got = relative_homology(fx.N, fx.L);
        HomologyResult want = oracle::relative_homology(fx.N, fx.L);
        CHECK(got == want);
        CHECK(got.betti == fx.betti);
        for (const auto& t : got.torsion) CHECK(t.empty());
    }
}

TEST_CASE("homology is invariant under basis permutation") {
    auto N = square_2d();
    CubicalSet L(2);
    L.insert_closed(cube({0, 0}, {1}));

    std::vector<Cube> order;
    for (const auto& c : N.cells)
        if (!L.contains(c)) order.push_back(c);

    std::mt19937 rng(7);
    HomologyResult base = relative_homology(N, L);
    for (int trial = 0; trial < 6; ++trial) {
        std::shuffle(order.begin(), order.end(), rng);
        auto cc = relative_chain_complex_ordered(N, L, order);
        CHECK(homology_of(cc) == base);
    }
}

TEST_CASE("euler characteristic equals the alternating betti sum") {
    auto N = square_2d();
    CubicalSet L(2);
    L.insert_closed(cube({0, 0}, {1}));
    auto cc = relative_chain_complex(N, L);
    auto h = homology_of(cc);
    long long chi = 0;
    int sign = 1;
    for (int b : h.betti) {
        chi += sign * b;
        sign = -sign;
    }
    CHECK(cc.euler_characteristic() == chi);
}

TEST_CASE("oracle agreement on random pairs up to 200 cells") {
    std::mt19937 rng(991);
    std::uniform_int_distribution<int> coord(0, 4), axes(0, 2), nc(2, 10);
    for (int trial = 0; trial < 15; ++trial) {
        CubicalSet N(3);
        int tops = nc(rng);
        for (int c = 0; c < tops; ++c) {
            Cube q;
            q.base = {coord(rng), coord(rng), coord(rng)};
            int na = axes(rng);
            for (int a = 0; a <= na; ++a) q.extent |= 1u << axes(rng);
            N.insert_closed(q);
        }
        // L: the closure of a random subset of N's cells
        CubicalSet L(3);
        for (const auto& c : N.cells)
            if (rng() % 3 == 0) L.insert_closed(c);
        REQUIRE(N.cells.size() <= 200);
        CHECK(relative_homology(N, L) == oracle::relative_homology(N, L));
    }
}

TEST_CASE("torsion agreement with the oracle on a twisted complex") {
    // Hand-built complex with d2 = [2]: H_1 = Z/2.
    ChainComplex cc;
    cc.ambient_dim = 2;
    cc.basis.resize(3);
    cc.basis[0] = {cube({0, 0}, {})};
    cc.basis[1] = {cube({0, 0}, {0})};
    cc.basis[2] = {cube({0, 0}, {0, 1})};
    cc.boundary.resize(3);
    cc.boundary[0] = IntMat(0, 1);
    cc.boundary[1] = IntMat(1, 1);  // zero column: a loop
    cc.boundary[2] = IntMat(1, 1);
    cc.boundary[2].at(0, 0) = 2;
    auto h = homology_of(cc);
    CHECK(h.betti == std::vector<int>{1, 0, 0});
    CHECK(h.torsion[1] == std::vector<long long>{2});
    auto div = oracle::smith_divisors(cc.boundary[2]);
    REQUIRE(div.size() == 1);
    CHECK(div[0] == 2);
}

TEST_CASE("conley index of the 1D blocks") {
    auto grid = fixtures::grid1d(4, 4);

    SUBCASE("full block with exit at the left end isolates a trivial index") {
        auto b = fixtures::interval_block(grid, 0, 4, FaceRole::Exit,
                                          FaceRole::Entrance);
        auto h = conley_index_of_block(b);
        CHECK(h.trivial());
        CHECK(h == oracle::relative_homology(b.region.realize(), b.exit_set()));
    }
    SUBCASE("attractor block: no exit, index of a point") {
        auto b = fixtures::interval_block(grid, 2, 4, FaceRole::Entrance,
                                          FaceRole::Entrance);
        auto h = conley_index_of_block(b);
        CHECK(h.is_z_in_single_degree(0));
        CHECK(h == oracle::relative_homology(b.region.realize(), b.exit_set()));
    }
    SUBCASE("repeller block: both ends exit, index of a circle") {
        auto b = fixtures::interval_block(grid, 0, 2, FaceRole::Exit, FaceRole::Exit);
        auto h = conley_index_of_block(b);
        CHECK(h.is_z_in_single_degree(1));
        CHECK(h == oracle::relative_homology(b.region.realize(), b.exit_set()));
    }
}

TEST_CASE("conley indices stay dimension-generic: a 3D pair with k=2") {
    Grid grid;
    grid.phase_box = Box{{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
    grid.resolution = {3, 3, 3};
    grid.lambda_resolution = 2;
    auto region = GridRegion::full_box(grid);

    SUBCASE("saddle block with a two-face exit has the index of S^1") {
        // unstable plane spanned by axis 0: exit on both axis-0 faces
        auto b = fixtures::declared_block(region, [](const BlockFace& f) {
            return f.axis == 0 ? FaceRole::Exit : FaceRole::Entrance;
        });
        auto h = conley_index_of_block(b);
        CHECK(h.is_z_in_single_degree(1));
        CHECK(h == oracle::relative_homology(b.region.realize(), b.exit_set()));
    }
    SUBCASE("repeller block with a belt exit has the index of S^2") {
        // two unstable directions: the exit set is the belt around axis 2
        auto b = fixtures::declared_block(region, [](const BlockFace& f) {
            return f.axis == 2 ? FaceRole::Entrance : FaceRole::Exit;
        });
        auto h = conley_index_of_block(b);
        CHECK(h.is_z_in_single_degree(2));
        CHECK(h == oracle::relative_homology(b.region.realize(), b.exit_set()));
    }
    SUBCASE("the pair of indices extracts k = 2") {
        auto saddle = fixtures::declared_block(region, [](const BlockFace& f) {
            return f.axis == 0 ? FaceRole::Exit : FaceRole::Entrance;
        });
        auto repeller = fixtures::declared_block(region, [](const BlockFace& f) {
            return f.axis == 2 ? FaceRole::Entrance : FaceRole::Exit;
        });
        auto k = extract_unstable_dimension(conley_index_of_block(saddle),
                                            conley_index_of_block(repeller));
        REQUIRE(k.has_value());
        CHECK(*k == 2);
    }
}

TEST_CASE("smith reduction survives entries that overflow 64-bit products") {
    // minimal pivots cannot help here: the first elimination step multiplies
    // two ~2^61 entries, forcing the arbitrary-precision rerun
    long long big = 3000000000000000000LL;  // 3e18
    long long big2 = 2000000000000000000LL;
    IntMat A(2, 2);
    A.at(0, 0) = big;
    A.at(0, 1) = big2;
    A.at(1, 0) = big2;
    A.at(1, 1) = big;
    auto snf = smith_normal_form(A);
    auto want = oracle::smith_divisors(A);
    REQUIRE(snf.rank == static_cast<int>(want.size()));
    for (int i = 0; i < snf.rank; ++i)
        CHECK(snf.divisors[i] == want[i].str());
}

TEST_CASE("relative homology rejects a non-subcomplex") {
    auto N = interval_1d(0, 2);
    CubicalSet L(1);
    L.insert_closed(cube({7}, {}));
    CHECK_THROWS_AS(relative_homology(N, L), NotASubcomplex);
}
