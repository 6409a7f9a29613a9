#include "quasirigid/tiling.hpp"

#include "quasirigid/dualize.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

using namespace quasirigid;

namespace {

std::vector<TileId> all_tiles(const Tiling& tl) {
    std::vector<TileId> v(tl.tile_count());
    for (TileId t = 0; t < tl.tile_count(); ++t) v[t] = t;
    return v;
}

} // namespace

TEST_CASE("square grid has m+n ribbons, each tile on two of them", "[tiling]") {
    Tiling tl = square_grid_patch(4, 3);
    auto ribbons = extract_ribbons(tl);
    REQUIRE(ribbons.size() == 7);

    std::vector<int> per_tile(tl.tile_count(), 0);
    for (const auto& rb : ribbons)
        for (TileId t : rb.tiles) ++per_tile[t];
    for (int n : per_tile) REQUIRE(n == 2);

    // Rows have 4 tiles, columns 3.
    std::multiset<size_t> sizes;
    for (const auto& rb : ribbons) sizes.insert(rb.tiles.size());
    REQUIRE(sizes == std::multiset<size_t>{3, 3, 3, 3, 4, 4, 4});
}

TEST_CASE("square grid ribbon pairs share one tile, parallels none", "[tiling]") {
    Tiling tl = square_grid_patch(3, 3);
    auto ribbons = extract_ribbons(tl);
    auto rep = ribbon_overlap_check(tl, ribbons);
    REQUIRE(rep.ok());

    auto of_tile = ribbons_of_tiles(tl, ribbons);
    std::set<std::pair<RibbonId, RibbonId>> crossing;
    for (TileId t = 0; t < tl.tile_count(); ++t)
        crossing.insert(std::minmax(of_tile[t][0], of_tile[t][1]));
    // 3 rows x 3 columns cross pairwise exactly once; parallel pairs never.
    REQUIRE(crossing.size() == 9);
    for (const auto& rb : ribbons)
        for (const auto& rb2 : ribbons)
            if (rb.id < rb2.id && rb.grid == rb2.grid)
                REQUIRE_FALSE(crossing.count({rb.id, rb2.id}));
}

TEST_CASE("ribbon labels follow the generating lines", "[tiling]") {
    double window = 6.0;
    auto spec = pentagrid_preset(testutil::penta_gammas());
    Tiling tl = dualize(spec, window);
    auto ribbons = extract_ribbons(tl);

    // One ribbon per line with an intersection inside the window, and the
    // ribbon's tile count equals the intersection count on that line.
    auto frames = grid_frames(spec);
    int lines_with_points = 0;
    std::map<std::pair<int, long>, int> expected_tiles;
    for (int i = 0; i < spec.size(); ++i) {
        auto [klo, khi] = line_index_range(frames[i], window);
        for (long k = klo; k <= khi; ++k) {
            auto scan = intersections_on_line(spec, i, k, window);
            if (!scan.points.empty()) {
                ++lines_with_points;
                expected_tiles[{i, k}] = static_cast<int>(scan.points.size());
            }
        }
    }
    REQUIRE(static_cast<int>(ribbons.size()) == lines_with_points);
    for (const auto& rb : ribbons) {
        REQUIRE(rb.has_label);
        REQUIRE(expected_tiles.at({rb.grid, rb.line}) == static_cast<int>(rb.tiles.size()));
        for (TileId t : rb.tiles) {
            const TileRecord& tr = tl.tiles[t];
            bool on_line = (tr.grid_a == rb.grid && tr.line_a == rb.line) ||
                           (tr.grid_b == rb.grid && tr.line_b == rb.line);
            REQUIRE(on_line);
        }
    }
}

TEST_CASE("two-ribbon lemma holds on pentagrid and tetragrid patches", "[tiling]") {
    std::vector<Tiling> patches;
    patches.push_back(testutil::penta_tiling(8.0));
    patches.push_back(testutil::tetra_tiling(8.0));
    for (const Tiling& tl : patches) {
        auto ribbons = extract_ribbons(tl);
        auto rep = ribbon_overlap_check(tl, ribbons);
        REQUIRE(rep.ok());
    }
}

TEST_CASE("maximal closure is a fixed point on full rectangles", "[tiling]") {
    Tiling ambient = dualize(orthogrid_preset({-0.5, -0.5}), 12.0);
    std::vector<TileId> rect;
    for (TileId t = 0; t < ambient.tile_count(); ++t) {
        const auto& tr = ambient.tiles[t];
        if (tr.line_a >= 1 && tr.line_a <= 4 && tr.line_b >= 1 && tr.line_b <= 3)
            rect.push_back(t);
    }
    REQUIRE(rect.size() == 12);
    Patch p = make_patch(ambient, rect);
    REQUIRE(p.simply_connected);
    REQUIRE(p.maximal);
    Patch closed = maximal_closure(ambient, p);
    REQUIRE(closed.tiles == p.tiles);
}

TEST_CASE("maximal closure re-adds a missing corner tile", "[tiling]") {
    Tiling ambient = dualize(orthogrid_preset({-0.5, -0.5}), 12.0);
    std::vector<TileId> rect;
    TileId corner = -1;
    for (TileId t = 0; t < ambient.tile_count(); ++t) {
        const auto& tr = ambient.tiles[t];
        if (tr.line_a >= 1 && tr.line_a <= 4 && tr.line_b >= 1 && tr.line_b <= 3) {
            if (tr.line_a == 4 && tr.line_b == 3) corner = t;
            else rect.push_back(t);
        }
    }
    REQUIRE(corner >= 0);
    Patch p = make_patch(ambient, rect);
    REQUIRE_FALSE(p.maximal);
    Patch closed = maximal_closure(ambient, p);
    REQUIRE(closed.maximal);
    REQUIRE(std::binary_search(closed.tiles.begin(), closed.tiles.end(), corner));
    REQUIRE(closed.tiles.size() == rect.size() + 1);
}

TEST_CASE("pentagrid working patch closes to a maximal simply connected patch", "[tiling]") {
    Tiling ambient = testutil::penta_tiling(8.0);
    std::vector<TileId> inner;
    for (TileId t = 0; t < ambient.tile_count(); ++t)
        if (ambient.tiles[t].dual_point->norm() <= 5.0) inner.push_back(t);
    Patch p = make_patch(ambient, largest_connected_component(ambient, inner));
    Patch closed = maximal_closure(ambient, p);
    REQUIRE(closed.maximal);
    REQUIRE(closed.simply_connected);

    // Monotone and idempotent.
    std::set<TileId> before(p.tiles.begin(), p.tiles.end());
    for (TileId t : p.tiles) REQUIRE(std::binary_search(closed.tiles.begin(), closed.tiles.end(), t));
    Patch again = maximal_closure(ambient, closed);
    REQUIRE(again.tiles == closed.tiles);
}

TEST_CASE("closure escaping the generated window is detected", "[tiling]") {
    // The whole generated tiling is its own closure fixpoint, but its rim
    // joints have incomplete stars, so the certificate must refuse it.
    Tiling ambient = testutil::penta_tiling(4.0);
    Patch p = make_patch(ambient, all_tiles(ambient));
    REQUIRE_THROWS_AS(maximal_closure(ambient, p), geometry_error);
}

TEST_CASE("restricted patch tiling keeps labels and stays valid", "[tiling]") {
    Tiling ambient = testutil::penta_tiling(6.0);
    Patch p = default_working_patch(ambient, 6.0);
    Tiling sub = restrict_tiling(ambient, p);
    REQUIRE(sub.tile_count() == static_cast<int>(p.tiles.size()));
    REQUIRE(sub.multigrid.has_value());
    for (TileId t = 0; t < sub.tile_count(); ++t) REQUIRE(sub.tiles[t].has_labels());
    for (JointId q = 0; q < sub.joint_count(); ++q) REQUIRE(sub.joints[q].index.has_value());
    auto ribbons = extract_ribbons(sub);
    REQUIRE(ribbon_overlap_check(sub, ribbons).ok());

    Patch whole = make_patch(sub, all_tiles(sub));
    REQUIRE(whole.simply_connected);
    REQUIRE(whole.maximal);
}

TEST_CASE("tilings violating the parallelogram invariants are rejected", "[tiling]") {
    Tiling tl = square_grid_patch(2, 2);

    SECTION("degenerate tile") {
        Tiling bad = tl;
        // Collapse one tile by merging two of its joints' positions.
        const auto& q = bad.tiles[0].joints;
        bad.joints[q[1]].pos = bad.joints[q[0]].pos;
        for (auto& j : bad.joints) j.index.reset();
        REQUIRE_THROWS_AS(bad.finalize(), geometry_error);
    }

    SECTION("disconnected tiling") {
        Tiling bad = square_grid_patch(1, 1);
        int base = bad.joint_count();
        for (JointId q = 0; q < 4; ++q) {
            Joint far = bad.joints[q];
            far.pos += {10.0, 0.0};
            far.index.reset();
            bad.joints.push_back(far);
        }
        for (auto& j : bad.joints) j.index.reset();
        TileRecord tr = bad.tiles[0];
        for (auto& q : tr.joints) q += base;
        bad.tiles.push_back(tr);
        bad.add_edges_from_tiles();
        REQUIRE_THROWS_AS(bad.finalize(), geometry_error);
    }
}
