// De Bruijn dualization: every face of a regular multigrid arrangement maps
// to the tiling vertex sum_j m_j e_j; every pairwise line intersection maps
// to a parallelogram tile.
#pragma once

#include "quasirigid/geometry.hpp"
#include "quasirigid/tiling.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace quasirigid {

// Builds the parallelogram tiling dual to the multigrid over the open disc of
// the given radius. The spec must be regular (and not fragile) on a slightly
// enlarged window.
inline Tiling dualize(const MultigridSpec& spec, double window_radius) {
    auto report = validate_regular(spec, 1.05 * window_radius);
    if (!report.regular) {
        std::ostringstream msg;
        msg << "multigrid is not regular in the window";
        if (!report.parallel_pairs.empty())
            msg << " (grids " << report.parallel_pairs[0].first + 1 << " and "
                << report.parallel_pairs[0].second + 1 << " are parallel)";
        else if (!report.triples.empty())
            msg << " (triple point near (" << report.triples[0].point.x << ", "
                << report.triples[0].point.y << "))";
        throw geometry_error(msg.str());
    }
    if (report.fragile)
        throw geometry_error("multigrid is fragile: a near-triple point was found "
                             "within 1000*eps; refusing to dualize");

    const int r = spec.size();
    auto frames = grid_frames(spec);
    const double nudge = 1e-6 * std::min(report.min_spacing, window_radius);

    struct RawTile {
        int i, j;
        long k, l;
        IndexVector base;
        Vec2 dual_point;
    };
    std::vector<RawTile> raw;

    for (int i = 0; i < r; ++i) {
        auto [klo, khi] = line_index_range(frames[i], window_radius);
        for (long k = klo; k <= khi; ++k) {
            auto scan = intersections_on_line(spec, i, k, window_radius);
            for (const auto& gi : scan.points) {
                if (gi.grid_a != i) continue;   // count each pair once, from the lower grid
                int j = gi.grid_b;
                long l = gi.line_b;

                // Dual basis to (n_i, n_j): stepping along u_i changes the
                // band coordinate of grid i by one and leaves grid j fixed.
                Vec2 ni = frames[i].normal, nj = frames[j].normal;
                double det = cross(ni, nj);
                Vec2 ui{nj.y / det, -nj.x / det};
                Vec2 uj{-ni.y / det, ni.x / det};

                // Probe the four faces around the intersection. The probe at
                // (si, sj) must land in the band block base + si*di + sj*dj.
                IndexVector base;
                for (int si = 0; si < 2; ++si) {
                    for (int sj = 0; sj < 2; ++sj) {
                        Vec2 step = (si ? ui : -ui) + (sj ? uj : -uj);
                        Vec2 probe = gi.point + step.normalized() * nudge;
                        IndexVector m;
                        m.c.resize(r);
                        for (int h = 0; h < r; ++h) {
                            try {
                                m.c[h] = grid_index(frames[h], h, probe);
                            } catch (const on_line_error&) {
                                throw geometry_error(
                                    "face probe landed on a line; the multigrid is "
                                    "too close to a triple point");
                            }
                        }
                        if (si == 0 && sj == 0) {
                            base = m;
                        } else if (m != base.shifted(i, si).shifted(j, sj)) {
                            throw geometry_error(
                                "inconsistent face indices at an intersection of grids " +
                                std::to_string(i + 1) + " and " + std::to_string(j + 1));
                        }
                    }
                }

                raw.push_back({i, j, k, l, base, gi.point});
            }
        }
    }
    if (raw.empty())
        throw geometry_error("window contains no grid intersection; enlarge it");

    std::sort(raw.begin(), raw.end(), [](const RawTile& a, const RawTile& b) {
        return std::tie(a.i, a.j, a.k, a.l) < std::tie(b.i, b.j, b.k, b.l);
    });

    Tiling tl;
    tl.multigrid = spec;

    std::map<IndexVector, JointId> joint_of;
    auto joint_id = [&](const IndexVector& m) {
        auto it = joint_of.find(m);
        if (it != joint_of.end()) return it->second;
        Vec2 pos{0, 0};
        for (int h = 0; h < r; ++h) pos += frames[h].edge * static_cast<double>(m[h]);
        JointId id = static_cast<JointId>(tl.joints.size());
        tl.joints.push_back({pos, m});
        joint_of.emplace(m, id);
        return id;
    };

    for (const RawTile& rt : raw) {
        TileRecord tr;
        tr.grid_a = rt.i;
        tr.grid_b = rt.j;
        tr.line_a = rt.k;
        tr.line_b = rt.l;
        tr.dual_point = rt.dual_point;
        IndexVector m00 = rt.base;
        IndexVector m10 = m00.shifted(rt.i, 1);
        IndexVector m11 = m10.shifted(rt.j, 1);
        IndexVector m01 = m00.shifted(rt.j, 1);
        if (cross(frames[rt.i].edge, frames[rt.j].edge) > 0.0)
            tr.joints = {joint_id(m00), joint_id(m10), joint_id(m11), joint_id(m01)};
        else
            tr.joints = {joint_id(m00), joint_id(m01), joint_id(m11), joint_id(m10)};
        tl.tiles.push_back(tr);
    }

    tl.add_edges_from_tiles();
    tl.finalize();
    return tl;
}

// --- consistency report -------------------------------------------------------

struct ConsistencyReport {
    bool edge_sharing_ok = true;    // interior edges in 2 tiles, boundary in 1
    bool edge_vectors_ok = true;    // tile sides are exactly {+-e_i, +-e_j}
    bool joint_positions_ok = true; // no two joints coincide
    bool no_overlap_ok = true;      // positive areas, full stars close to 2*pi
    std::vector<std::string> failures;
    bool ok() const {
        return edge_sharing_ok && edge_vectors_ok && joint_positions_ok && no_overlap_ok;
    }
};

inline ConsistencyReport verify_dual_consistency(const Tiling& tl) {
    ConsistencyReport rep;
    double scale = 0.0;
    for (const auto& j : tl.joints) scale = std::max(scale, j.pos.norm());
    const double tol = 1e-9 * std::max(1.0, scale);

    for (EdgeId e = 0; e < tl.edge_count(); ++e) {
        size_t n = tl.edge_tiles[e].size();
        if (n != 1 && n != 2) {
            rep.edge_sharing_ok = false;
            rep.failures.push_back("edge " + std::to_string(e) + " lies in " +
                                   std::to_string(n) + " tiles");
        }
    }

    if (tl.multigrid) {
        auto frames = grid_frames(*tl.multigrid);
        for (TileId t = 0; t < tl.tile_count(); ++t) {
            const TileRecord& tr = tl.tiles[t];
            if (!tr.has_labels()) continue;
            for (int s = 0; s < 4; ++s) {
                Vec2 v = tl.joints[tr.joints[(s + 1) % 4]].pos - tl.joints[tr.joints[s]].pos;
                Vec2 ea = frames[tr.grid_a].edge, eb = frames[tr.grid_b].edge;
                bool match = distance(v, ea) < tol || distance(v, -ea) < tol ||
                             distance(v, eb) < tol || distance(v, -eb) < tol;
                if (!match) {
                    rep.edge_vectors_ok = false;
                    rep.failures.push_back("tile " + std::to_string(t) +
                                           " has a side that is not a dual edge vector");
                }
            }
        }
    }

    {
        // Distinct joints must not coincide; grid by rounded position.
        std::map<std::pair<long long, long long>, std::vector<JointId>> cells;
        const double cell = std::max(tol * 16.0, 1e-12);
        for (JointId q = 0; q < tl.joint_count(); ++q) {
            long long cx = static_cast<long long>(std::floor(tl.joints[q].pos.x / cell));
            long long cy = static_cast<long long>(std::floor(tl.joints[q].pos.y / cell));
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy) {
                    auto it = cells.find({cx + dx, cy + dy});
                    if (it == cells.end()) continue;
                    for (JointId o : it->second)
                        if (distance(tl.joints[q].pos, tl.joints[o].pos) < tol) {
                            rep.joint_positions_ok = false;
                            rep.failures.push_back("joints " + std::to_string(o) + " and " +
                                                   std::to_string(q) + " coincide");
                        }
                }
            cells[{cx, cy}].push_back(q);
        }
    }

    for (TileId t = 0; t < tl.tile_count(); ++t) {
        const auto& q = tl.tiles[t].joints;
        double area = cross(tl.joints[q[1]].pos - tl.joints[q[0]].pos,
                            tl.joints[q[3]].pos - tl.joints[q[0]].pos);
        if (area <= 0.0) {
            rep.no_overlap_ok = false;
            rep.failures.push_back("tile " + std::to_string(t) + " has non-positive area");
        }
    }
    for (JointId q = 0; q < tl.joint_count(); ++q) {
        if (!tl.interior_joint(q)) continue;
        double angle_sum = 0.0;
        for (TileId t : tl.joint_tiles[q]) {
            const auto& js = tl.tiles[t].joints;
            int at = 0;
            while (js[at] != q) ++at;
            Vec2 u = tl.joints[js[(at + 1) % 4]].pos - tl.joints[q].pos;
            Vec2 v = tl.joints[js[(at + 3) % 4]].pos - tl.joints[q].pos;
            angle_sum += std::atan2(std::abs(cross(u, v)), dot(u, v));
        }
        if (std::abs(angle_sum - 2.0 * std::numbers::pi) > 1e-7) {
            rep.no_overlap_ok = false;
            rep.failures.push_back("tiles around joint " + std::to_string(q) +
                                   " cover an angle of " + std::to_string(angle_sum));
        }
    }
    return rep;
}

// --- working patches ----------------------------------------------------------

// The default analysis patch: the maximal closure of the largest connected
// family of tiles generated within fraction*window_radius.
inline Patch default_working_patch(const Tiling& tl, double window_radius,
                                   double fraction = 0.8) {
    std::vector<TileId> inner;
    for (TileId t = 0; t < tl.tile_count(); ++t) {
        if (!tl.tiles[t].dual_point)
            throw input_error("tiling does not carry dual intersection points");
        if (tl.tiles[t].dual_point->norm() <= fraction * window_radius)
            inner.push_back(t);
    }
    if (inner.empty())
        throw geometry_error("no tiles inside the working fraction of the window");
    auto comp = largest_connected_component(tl, inner);
    Patch p = make_patch(tl, comp);
    p = maximal_closure(tl, p);
    if (!p.simply_connected)
        throw geometry_error("working patch failed the simple-connectivity check");
    return p;
}

// Axis-aligned m x n square-grid patch, produced through the regular pipeline
// (orthogonal grids, dualization, label crop).
inline Tiling square_grid_patch(int m, int n) {
    if (m < 1 || n < 1) throw input_error("square grid needs m, n >= 1");
    double radius = std::hypot(m + 2.0, n + 2.0);
    Tiling full = dualize(orthogrid_preset({-0.5, -0.5}), radius);
    std::vector<TileId> keep;
    for (TileId t = 0; t < full.tile_count(); ++t) {
        const TileRecord& tr = full.tiles[t];
        if (tr.line_a >= 1 && tr.line_a <= m && tr.line_b >= 1 && tr.line_b <= n)
            keep.push_back(t);
    }
    Patch p = make_patch(full, keep);
    return restrict_tiling(full, p);
}

} // namespace quasirigid
