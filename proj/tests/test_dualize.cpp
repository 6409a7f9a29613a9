#include "quasirigid/dualize.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

using namespace quasirigid;

namespace {

// Acute angle between the two edge directions of a tile.
double tile_angle(const Tiling& tl, TileId t) {
    const auto& q = tl.tiles[t].joints;
    Vec2 u = tl.joints[q[1]].pos - tl.joints[q[0]].pos;
    Vec2 v = tl.joints[q[3]].pos - tl.joints[q[0]].pos;
    return line_angle_between(u, v);
}

std::set<long long> canonical_angle_set(const Tiling& tl) {
    std::set<long long> angles;
    for (TileId t = 0; t < tl.tile_count(); ++t)
        angles.insert(std::llround(tile_angle(tl, t) * 1e9));
    return angles;
}

// Canonicalised set of distinct edge vectors (sign-normalised, rounded).
std::set<std::pair<long long, long long>> edge_vector_set(const Tiling& tl) {
    std::set<std::pair<long long, long long>> out;
    for (const Edge& e : tl.edges) {
        Vec2 v = canonical_sign(tl.joints[e.b].pos - tl.joints[e.a].pos);
        out.insert({std::llround(v.x * 1e9), std::llround(v.y * 1e9)});
    }
    return out;
}

} // namespace

TEST_CASE("orthogonal grids dualize to the unit square tiling", "[dualize]") {
    Tiling tl = dualize(orthogrid_preset({0.25, 0.45}), 3.0);
    REQUIRE(tl.tile_count() > 0);
    for (TileId t = 0; t < tl.tile_count(); ++t) {
        const auto& q = tl.tiles[t].joints;
        for (int s = 0; s < 4; ++s) {
            double len = distance(tl.joints[q[s]].pos, tl.joints[q[(s + 1) % 4]].pos);
            REQUIRE(len == Catch::Approx(1.0).margin(1e-12));
        }
        REQUIRE(tile_angle(tl, t) == Catch::Approx(std::numbers::pi / 2).margin(1e-12));
    }
    REQUIRE(verify_dual_consistency(tl).ok());
}

TEST_CASE("pentagrid dual carries exactly two rhomb classes", "[dualize]") {
    Tiling tl = testutil::penta_tiling(6.0);
    auto angles = canonical_angle_set(tl);
    REQUIRE(angles.size() == 2);
    double thin = std::numbers::pi / 5.0;        // 36 degrees
    double thick = 2.0 * std::numbers::pi / 5.0; // 72 degrees
    REQUIRE(angles.count(std::llround(thin * 1e9)) == 1);
    REQUIRE(angles.count(std::llround(thick * 1e9)) == 1);

    auto rep = verify_dual_consistency(tl);
    for (const auto& f : rep.failures) INFO(f);
    REQUIRE(rep.ok());
}

TEST_CASE("tetragrid dual carries squares and pi/4 rhombs", "[dualize]") {
    Tiling tl = testutil::tetra_tiling(6.0);
    auto angles = canonical_angle_set(tl);
    REQUIRE(angles.size() == 2);
    REQUIRE(angles.count(std::llround(std::numbers::pi / 4.0 * 1e9)) == 1);
    REQUIRE(angles.count(std::llround(std::numbers::pi / 2.0 * 1e9)) == 1);
    REQUIRE(verify_dual_consistency(tl).ok());
}

TEST_CASE("irregular and fragile specs are refused", "[dualize]") {
    REQUIRE_THROWS_AS(dualize(pentagrid_preset({0, 0, 0, 0, 0}), 4.0), geometry_error);
}

TEST_CASE("consistency checker catches a corrupted joint", "[dualize]") {
    Tiling tl = dualize(orthogrid_preset({0.25, 0.45}), 3.0);
    tl.joints[0].pos += {0.05, 0.0};
    auto rep = verify_dual_consistency(tl);
    REQUIRE_FALSE(rep.ok());
    REQUIRE_FALSE(rep.edge_vectors_ok);
    REQUIRE_FALSE(rep.failures.empty());
    bool names_tile = false;
    for (const auto& f : rep.failures)
        if (f.find("tile ") != std::string::npos) names_tile = true;
    REQUIRE(names_tile);
}

TEST_CASE("offset period shift preserves the canonical edge-vector set", "[dualize]") {
    auto gammas = testutil::penta_gammas();
    Tiling base = dualize(pentagrid_preset(gammas), 5.0);

    auto shifted_gammas = gammas;
    shifted_gammas[2] += 1.0;
    Tiling shifted = dualize(pentagrid_preset(shifted_gammas), 5.0);

    REQUIRE(edge_vector_set(base) == edge_vector_set(shifted));
    REQUIRE(canonical_angle_set(base) == canonical_angle_set(shifted));
}

TEST_CASE("tile count grows with the window", "[dualize]") {
    auto spec = pentagrid_preset(testutil::penta_gammas());
    REQUIRE(dualize(spec, 3.0).tile_count() < dualize(spec, 6.0).tile_count());
}

TEST_CASE("window without intersections is an error", "[dualize]") {
    auto spec = orthogrid_preset({0.5, 0.5});
    REQUIRE_THROWS_AS(dualize(spec, 0.05), geometry_error);
}

TEST_CASE("square grid patch helper produces the m x n grid", "[dualize]") {
    Tiling tl = square_grid_patch(3, 2);
    REQUIRE(tl.tile_count() == 6);
    REQUIRE(tl.joint_count() == 12);
    REQUIRE(tl.edge_count() == 17);
    Patch p = make_patch(tl, [&] {
        std::vector<TileId> all(tl.tile_count());
        for (TileId t = 0; t < tl.tile_count(); ++t) all[t] = t;
        return all;
    }());
    REQUIRE(p.simply_connected);
}
