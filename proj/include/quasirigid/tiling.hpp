// Combinatorial-geometric model of a finite parallelogram tiling patch:
// joints, edges, tiles, ribbons, patch closure.
#pragma once

#include "quasirigid/error.hpp"
#include "quasirigid/geometry.hpp"
#include "quasirigid/vec2.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace quasirigid {

using JointId = int;
using EdgeId = int;
using TileId = int;
using RibbonId = int;

struct Joint {
    Vec2 pos;
    std::optional<IndexVector> index;
};

struct Edge {
    JointId a = -1, b = -1;        // a < b
    int direction_class = -1;      // grid id when known
};

struct TileRecord {
    std::array<JointId, 4> joints{};   // cyclic order, counterclockwise
    int grid_a = -1, grid_b = -1;      // grid pair, grid_a < grid_b; -1 if unlabelled
    long line_a = 0, line_b = 0;
    std::optional<Vec2> dual_point;    // generating intersection, multigrid plane

    bool has_labels() const { return grid_a >= 0; }
};

struct Tiling {
    std::vector<Joint> joints;
    std::vector<Edge> edges;
    std::vector<TileRecord> tiles;
    std::optional<MultigridSpec> multigrid;

    // adjacency, built by finalize()
    std::map<std::pair<JointId, JointId>, EdgeId> edge_lookup;
    std::vector<std::array<EdgeId, 4>> tile_edges;
    std::vector<std::vector<TileId>> edge_tiles;
    std::vector<std::vector<EdgeId>> joint_edges;
    std::vector<std::vector<TileId>> joint_tiles;
    std::vector<Vec2> class_edge_vectors;   // +e_j per direction class, when known

    int joint_count() const { return static_cast<int>(joints.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int tile_count() const { return static_cast<int>(tiles.size()); }

    int grid_count() const {
        if (multigrid) return multigrid->size();
        for (const auto& j : joints)
            if (j.index) return j.index->size();
        return 0;
    }

    EdgeId edge_between(JointId a, JointId b) const {
        auto it = edge_lookup.find(std::minmax(a, b));
        return it == edge_lookup.end() ? -1 : it->second;
    }

    Vec2 tile_centroid(TileId t) const {
        Vec2 c{0, 0};
        for (JointId q : tiles[t].joints) c += joints[q].pos;
        return c / 4.0;
    }

    double tile_diameter(TileId t) const {
        const auto& q = tiles[t].joints;
        return std::max(distance(joints[q[0]].pos, joints[q[2]].pos),
                        distance(joints[q[1]].pos, joints[q[3]].pos));
    }

    double max_tile_diameter() const {
        double d = 0.0;
        for (TileId t = 0; t < tile_count(); ++t) d = std::max(d, tile_diameter(t));
        return d;
    }

    // A joint whose incident fan of tiles closes up: every incident edge is
    // shared by two tiles.
    bool interior_joint(JointId j) const {
        if (joint_edges[j].empty()) return false;
        for (EdgeId e : joint_edges[j])
            if (edge_tiles[e].size() != 2) return false;
        return true;
    }

    // Oriented edge vector of a direction class (pointing toward increasing
    // band index). Known for multigrid tilings and index-carrying imports.
    Vec2 edge_vector_of_class(int cls) const {
        if (cls < 0 || cls >= static_cast<int>(class_edge_vectors.size()))
            throw geometry_error("unknown edge direction class");
        return class_edge_vectors[cls];
    }

    // Registers the four sides of every tile as edges (construction helper).
    void add_edges_from_tiles() {
        std::set<std::pair<JointId, JointId>> have;
        for (const Edge& e : edges) have.insert(std::minmax(e.a, e.b));
        for (const TileRecord& t : tiles) {
            for (int s = 0; s < 4; ++s) {
                auto key = std::minmax(t.joints[s], t.joints[(s + 1) % 4]);
                if (have.insert(key).second) edges.push_back({key.first, key.second, -1});
            }
        }
    }

    void finalize();
};

// --- validation and adjacency ------------------------------------------------

inline void Tiling::finalize() {
    const int J = joint_count();
    if (J == 0) throw input_error("tiling has no joints");

    int r = 0;
    for (const auto& j : joints) {
        if (!std::isfinite(j.pos.x) || !std::isfinite(j.pos.y))
            throw input_error("joint position is not finite");
        if (j.index) {
            if (r == 0) r = j.index->size();
            else if (j.index->size() != r)
                throw input_error("inconsistent index vector lengths");
        }
    }
    if (multigrid && r > 0 && r != multigrid->size())
        throw input_error("index vectors do not match the multigrid");

    double scale = 0.0;
    for (const auto& j : joints) scale = std::max(scale, j.pos.norm());
    const double tol = 1e-9 * std::max(1.0, scale);

    // Edges: normalised, unique, valid endpoints.
    edge_lookup.clear();
    for (EdgeId e = 0; e < edge_count(); ++e) {
        Edge& ed = edges[e];
        if (ed.a < 0 || ed.b < 0 || ed.a >= J || ed.b >= J || ed.a == ed.b)
            throw input_error("edge " + std::to_string(e) + " has invalid endpoints");
        if (ed.a > ed.b) std::swap(ed.a, ed.b);
        if (!edge_lookup.emplace(std::make_pair(ed.a, ed.b), e).second)
            throw input_error("duplicate edge " + std::to_string(e));
        if (distance(joints[ed.a].pos, joints[ed.b].pos) < tol)
            throw geometry_error("edge " + std::to_string(e) + " has zero length");
    }

    // Tiles: four distinct joints, parallelogram shape, positive area, all
    // four sides present as edges.
    tile_edges.assign(tile_count(), {});
    for (TileId t = 0; t < tile_count(); ++t) {
        TileRecord& tr = tiles[t];
        for (JointId q : tr.joints)
            if (q < 0 || q >= J)
                throw input_error("tile " + std::to_string(t) + " references a missing joint");
        for (int i = 0; i < 4; ++i)
            for (int k = i + 1; k < 4; ++k)
                if (tr.joints[i] == tr.joints[k])
                    throw geometry_error("tile " + std::to_string(t) + " repeats a joint");

        Vec2 p0 = joints[tr.joints[0]].pos, p1 = joints[tr.joints[1]].pos;
        Vec2 p2 = joints[tr.joints[2]].pos, p3 = joints[tr.joints[3]].pos;
        if (distance(p0 + p2, p1 + p3) > 1e3 * tol)
            throw geometry_error("tile " + std::to_string(t) + " is not a parallelogram");
        double area = cross(p1 - p0, p3 - p0);
        if (std::abs(area) < 1e-9 * std::max(1.0, scale * scale))
            throw geometry_error("tile " + std::to_string(t) + " is degenerate");
        if (area < 0.0) std::swap(tr.joints[1], tr.joints[3]);

        for (int s = 0; s < 4; ++s) {
            EdgeId e = edge_between(tr.joints[s], tr.joints[(s + 1) % 4]);
            if (e < 0)
                throw input_error("tile " + std::to_string(t) +
                                  " has a side that is not in the edge list");
            tile_edges[t][s] = e;
        }
    }

    // Incidence maps.
    edge_tiles.assign(edge_count(), {});
    joint_edges.assign(J, {});
    joint_tiles.assign(J, {});
    for (TileId t = 0; t < tile_count(); ++t) {
        for (EdgeId e : tile_edges[t]) edge_tiles[e].push_back(t);
        for (JointId q : tiles[t].joints) joint_tiles[q].push_back(t);
    }
    for (EdgeId e = 0; e < edge_count(); ++e) {
        joint_edges[edges[e].a].push_back(e);
        joint_edges[edges[e].b].push_back(e);
        if (edge_tiles[e].size() > 2)
            throw geometry_error("edge " + std::to_string(e) + " is shared by >2 tiles");
        if (edge_tiles[e].empty())
            throw input_error("edge " + std::to_string(e) + " belongs to no tile");
    }

    // Tiles sharing two joints must share exactly one edge.
    std::map<std::pair<TileId, TileId>, int> shared;
    for (JointId q = 0; q < J; ++q)
        for (size_t i = 0; i < joint_tiles[q].size(); ++i)
            for (size_t k = i + 1; k < joint_tiles[q].size(); ++k)
                ++shared[std::minmax(joint_tiles[q][i], joint_tiles[q][k])];
    for (const auto& [pair, n] : shared) {
        if (n < 2) continue;
        if (n > 2)
            throw geometry_error("tiles " + std::to_string(pair.first) + " and " +
                                 std::to_string(pair.second) + " overlap");
        int common_edges = 0;
        for (EdgeId e : tile_edges[pair.first])
            for (EdgeId f : tile_edges[pair.second])
                if (e == f) ++common_edges;
        if (common_edges != 1)
            throw geometry_error("tiles " + std::to_string(pair.first) + " and " +
                                 std::to_string(pair.second) +
                                 " share two joints but not one edge");
    }

    // Direction classes from index vectors when available.
    if (r > 0) {
        bool all_indexed = true;
        for (const auto& j : joints)
            if (!j.index) { all_indexed = false; break; }
        if (all_indexed) {
            class_edge_vectors.assign(r, Vec2{0, 0});
            std::vector<bool> seen(r, false);
            for (Edge& ed : edges) {
                const IndexVector& ma = *joints[ed.a].index;
                const IndexVector& mb = *joints[ed.b].index;
                int diff_coord = -1, diff = 0, diffs = 0;
                for (int c = 0; c < r; ++c) {
                    int d = mb[c] - ma[c];
                    if (d != 0) { ++diffs; diff_coord = c; diff = d; }
                }
                if (diffs != 1 || std::abs(diff) != 1)
                    throw geometry_error("edge (" + std::to_string(ed.a) + "," +
                                         std::to_string(ed.b) +
                                         ") does not join adjacent index vectors");
                ed.direction_class = diff_coord;
                Vec2 v = diff > 0 ? joints[ed.b].pos - joints[ed.a].pos
                                  : joints[ed.a].pos - joints[ed.b].pos;
                if (!seen[diff_coord]) { class_edge_vectors[diff_coord] = v; seen[diff_coord] = true; }
            }
            if (multigrid) {
                auto frames = grid_frames(*multigrid);
                for (int c = 0; c < r; ++c) class_edge_vectors[c] = frames[c].edge;
            }
        }
    }

    // Connectivity of the tile-adjacency graph.
    if (tile_count() > 0) {
        std::vector<char> seen(tile_count(), 0);
        std::queue<TileId> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            TileId t = q.front();
            q.pop();
            for (EdgeId e : tile_edges[t])
                for (TileId o : edge_tiles[e])
                    if (!seen[o]) { seen[o] = 1; ++reached; q.push(o); }
        }
        if (reached != tile_count())
            throw geometry_error("tile-adjacency graph is not connected");
    }
}

// --- ribbons -----------------------------------------------------------------

struct Ribbon {
    RibbonId id = -1;
    std::vector<TileId> tiles;          // path order
    std::vector<EdgeId> internal_edges; // path order, tiles.size()+1 of them
    Vec2 internal_dir;                  // unit, canonical sign
    int grid = -1;                      // direction class / generating grid
    long line = 0;                      // generating line index, when labelled
    bool has_label = false;
};

namespace detail {

// Axis of a tile = one of its two opposite-edge pairs: axis 0 is sides {0,2},
// axis 1 is sides {1,3}.
inline int side_of_edge(const Tiling& tl, TileId t, EdgeId e) {
    for (int s = 0; s < 4; ++s)
        if (tl.tile_edges[t][s] == e) return s;
    throw geometry_error("edge not on tile");
}

} // namespace detail

inline std::vector<Ribbon> extract_ribbons(const Tiling& tl) {
    std::vector<std::array<char, 2>> visited(tl.tile_count(), {0, 0});
    std::vector<Ribbon> ribbons;

    for (TileId t0 = 0; t0 < tl.tile_count(); ++t0) {
        for (int axis = 0; axis < 2; ++axis) {
            if (visited[t0][axis]) continue;

            // Walk to one end of the chain, then traverse it fully.
            TileId t = t0;
            int side = axis;   // internal side of the current tile
            for (int step = 0; step <= 2 * tl.tile_count(); ++step) {
                EdgeId e = tl.tile_edges[t][side];
                if (tl.edge_tiles[e].size() < 2) break;
                TileId next = tl.edge_tiles[e][0] == t ? tl.edge_tiles[e][1]
                                                       : tl.edge_tiles[e][0];
                int ns = detail::side_of_edge(tl, next, e);
                if (next == t0 && ns % 2 == axis) break;   // closed ribbon
                t = next;
                side = (ns + 2) % 4;
            }

            Ribbon rb;
            int enter_side = side;   // boundary (or wrap) edge comes first
            while (true) {
                int ax = enter_side % 2;
                if (visited[t][ax]) break;   // closed chain completed
                visited[t][ax] = 1;
                rb.tiles.push_back(t);
                rb.internal_edges.push_back(tl.tile_edges[t][enter_side]);
                EdgeId exit_edge = tl.tile_edges[t][(enter_side + 2) % 4];
                if (tl.edge_tiles[exit_edge].size() < 2) {
                    rb.internal_edges.push_back(exit_edge);
                    break;
                }
                TileId next = tl.edge_tiles[exit_edge][0] == t ? tl.edge_tiles[exit_edge][1]
                                                               : tl.edge_tiles[exit_edge][0];
                t = next;
                enter_side = detail::side_of_edge(tl, t, exit_edge);
            }

            const Edge& first = tl.edges[rb.internal_edges.front()];
            Vec2 v = tl.joints[first.b].pos - tl.joints[first.a].pos;
            rb.internal_dir = canonical_sign(v.normalized());
            for (EdgeId e : rb.internal_edges) {
                Vec2 w = tl.joints[tl.edges[e].b].pos - tl.joints[tl.edges[e].a].pos;
                if (std::abs(cross(rb.internal_dir, w.normalized())) > 1e-9)
                    throw geometry_error("ribbon internal edges are not parallel (malformed tile)");
            }

            // Grid/line label from the tiles, when present.
            int cls = first.direction_class;
            if (cls >= 0) {
                rb.grid = cls;
                bool consistent = true;
                bool have_line = false;
                for (TileId tt : rb.tiles) {
                    const TileRecord& tr = tl.tiles[tt];
                    if (!tr.has_labels()) { consistent = false; break; }
                    long line = tr.grid_a == cls ? tr.line_a
                               : tr.grid_b == cls ? tr.line_b
                                                  : (consistent = false, 0L);
                    if (!consistent) break;
                    if (!have_line) { rb.line = line; have_line = true; }
                    else if (rb.line != line) { consistent = false; break; }
                }
                rb.has_label = consistent && have_line;
            }
            ribbons.push_back(std::move(rb));
        }
    }

    std::sort(ribbons.begin(), ribbons.end(), [](const Ribbon& a, const Ribbon& b) {
        if (a.has_label != b.has_label) return a.has_label;
        if (a.has_label)
            return std::tie(a.grid, a.line) < std::tie(b.grid, b.line);
        return *std::min_element(a.tiles.begin(), a.tiles.end()) <
               *std::min_element(b.tiles.begin(), b.tiles.end());
    });
    for (RibbonId i = 0; i < static_cast<RibbonId>(ribbons.size()); ++i) ribbons[i].id = i;
    return ribbons;
}

// Map tile -> its two ribbons.
inline std::vector<std::array<RibbonId, 2>> ribbons_of_tiles(const Tiling& tl,
                                                             const std::vector<Ribbon>& ribbons) {
    std::vector<std::array<RibbonId, 2>> out(tl.tile_count(), {-1, -1});
    for (const Ribbon& rb : ribbons)
        for (TileId t : rb.tiles) {
            if (out[t][0] < 0) out[t][0] = rb.id;
            else if (out[t][1] < 0) out[t][1] = rb.id;
            else throw geometry_error("tile " + std::to_string(t) + " lies on >2 ribbons");
        }
    for (TileId t = 0; t < tl.tile_count(); ++t)
        if (out[t][1] < 0)
            throw geometry_error("tile " + std::to_string(t) + " lies on <2 ribbons");
    return out;
}

struct OverlapReport {
    struct Violation {
        RibbonId a, b;
        std::vector<TileId> shared;
    };
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Checks that every unordered ribbon pair shares at most one tile.
inline OverlapReport ribbon_overlap_check(const Tiling& tl, const std::vector<Ribbon>& ribbons) {
    auto of_tile = ribbons_of_tiles(tl, ribbons);
    std::map<std::pair<RibbonId, RibbonId>, std::vector<TileId>> pairs;
    for (TileId t = 0; t < tl.tile_count(); ++t)
        pairs[std::minmax(of_tile[t][0], of_tile[t][1])].push_back(t);
    OverlapReport rep;
    for (auto& [key, tiles] : pairs)
        if (tiles.size() > 1) rep.violations.push_back({key.first, key.second, tiles});
    return rep;
}

// --- patches -----------------------------------------------------------------

struct Patch {
    std::vector<TileId> tiles;            // sorted, unique
    std::vector<EdgeId> boundary_edges;   // one incident patch tile
    bool simply_connected = false;
    bool maximal = false;
};

inline Patch make_patch(const Tiling& tl, std::vector<TileId> tile_ids) {
    std::sort(tile_ids.begin(), tile_ids.end());
    tile_ids.erase(std::unique(tile_ids.begin(), tile_ids.end()), tile_ids.end());
    if (tile_ids.empty()) throw input_error("patch has no tiles");

    Patch p;
    p.tiles = std::move(tile_ids);

    std::vector<char> in_patch(tl.tile_count(), 0);
    for (TileId t : p.tiles) in_patch[t] = 1;

    std::set<JointId> joints;
    std::map<EdgeId, int> edge_mult;
    for (TileId t : p.tiles) {
        for (JointId q : tl.tiles[t].joints) joints.insert(q);
        for (EdgeId e : tl.tile_edges[t]) ++edge_mult[e];
    }
    for (const auto& [e, n] : edge_mult)
        if (n == 1) p.boundary_edges.push_back(e);

    long V = static_cast<long>(joints.size());
    long E = static_cast<long>(edge_mult.size());
    long F = static_cast<long>(p.tiles.size());
    p.simply_connected = (V - E + F == 1);

    p.maximal = true;
    for (TileId t = 0; t < tl.tile_count(); ++t) {
        if (in_patch[t]) continue;
        int on = 0;
        for (JointId q : tl.tiles[t].joints)
            if (joints.count(q)) ++on;
        if (on >= 3) { p.maximal = false; break; }
    }
    return p;
}

// Grows the patch by absorbing outside tiles with >=3 joints on it, until no
// such tile remains. With certify=true the fixpoint is only accepted when the
// ambient tiling provably contains every possible candidate.
inline Patch maximal_closure(const Tiling& tl, const Patch& start, bool certify = true) {
    std::vector<char> in_patch(tl.tile_count(), 0);
    std::vector<char> joint_in(tl.joint_count(), 0);
    for (TileId t : start.tiles) {
        in_patch[t] = 1;
        for (JointId q : tl.tiles[t].joints) joint_in[q] = 1;
    }

    auto count_on = [&](TileId t) {
        int on = 0;
        for (JointId q : tl.tiles[t].joints)
            if (joint_in[q]) ++on;
        return on;
    };

    std::set<TileId> candidates;
    auto add_neighbours = [&](TileId t) {
        for (JointId q : tl.tiles[t].joints)
            for (TileId o : tl.joint_tiles[q])
                if (!in_patch[o]) candidates.insert(o);
    };
    for (TileId t : start.tiles) add_neighbours(t);

    bool grew = true;
    while (grew) {
        grew = false;
        for (auto it = candidates.begin(); it != candidates.end();) {
            TileId t = *it;
            if (in_patch[t]) { it = candidates.erase(it); continue; }
            if (count_on(t) >= 3) {
                in_patch[t] = 1;
                for (JointId q : tl.tiles[t].joints) joint_in[q] = 1;
                add_neighbours(t);
                it = candidates.erase(it);
                grew = true;
            } else {
                ++it;
            }
        }
    }

    std::vector<TileId> tiles;
    for (TileId t = 0; t < tl.tile_count(); ++t)
        if (in_patch[t]) tiles.push_back(t);
    Patch result = make_patch(tl, tiles);

    if (certify) {
        // Sound fixpoint: every patch joint must have its complete tile fan
        // inside the ambient tiling, otherwise an unseen tile beyond the
        // generated window could still qualify.
        for (JointId q = 0; q < tl.joint_count(); ++q) {
            if (!joint_in[q]) continue;
            bool on_boundary = false;
            for (EdgeId e : tl.joint_edges[q])
                if (tl.edge_tiles[e].size() < 2) { on_boundary = true; break; }
            if (on_boundary && !tl.interior_joint(q))
                throw geometry_error(
                    "patch closure reached the rim of the generated tiling; "
                    "use a larger window");
        }
    }
    return result;
}

// Largest edge-connected component of a tile subset (ties: component holding
// the smallest tile id).
inline std::vector<TileId> largest_connected_component(const Tiling& tl,
                                                       const std::vector<TileId>& subset) {
    std::vector<char> in_subset(tl.tile_count(), 0), seen(tl.tile_count(), 0);
    for (TileId t : subset) in_subset[t] = 1;
    std::vector<TileId> best;
    for (TileId s : subset) {
        if (seen[s]) continue;
        std::vector<TileId> comp;
        std::queue<TileId> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            TileId t = q.front();
            q.pop();
            comp.push_back(t);
            for (EdgeId e : tl.tile_edges[t])
                for (TileId o : tl.edge_tiles[e])
                    if (in_subset[o] && !seen[o]) { seen[o] = 1; q.push(o); }
        }
        if (comp.size() > best.size()) best = std::move(comp);
    }
    std::sort(best.begin(), best.end());
    return best;
}

// Standalone tiling induced by a patch, canonically reindexed.
inline Tiling restrict_tiling(const Tiling& tl, const Patch& patch) {
    Tiling out;
    out.multigrid = tl.multigrid;

    std::vector<JointId> joint_map(tl.joint_count(), -1);
    for (TileId t : patch.tiles)
        for (JointId q : tl.tiles[t].joints) joint_map[q] = 0;
    for (JointId q = 0, next = 0; q < tl.joint_count(); ++q)
        if (joint_map[q] == 0) {
            joint_map[q] = next++;
            out.joints.push_back(tl.joints[q]);
        } else {
            joint_map[q] = -1;
        }

    std::set<EdgeId> edge_set;
    for (TileId t : patch.tiles)
        for (EdgeId e : tl.tile_edges[t]) edge_set.insert(e);
    for (EdgeId e : edge_set) {
        Edge ne = tl.edges[e];
        ne.a = joint_map[ne.a];
        ne.b = joint_map[ne.b];
        out.edges.push_back(ne);
    }

    for (TileId t : patch.tiles) {
        TileRecord tr = tl.tiles[t];
        for (auto& q : tr.joints) q = joint_map[q];
        out.tiles.push_back(tr);
    }

    out.finalize();
    return out;
}

} // namespace quasirigid
