// Ribbon shears and the free-basis expansion: every flex of a maximal simply
// connected patch is translation + a unique combination of ribbon shears,
// recovered tile by tile along a breadth-first tile order.
#pragma once

#include "quasirigid/rigidity.hpp"
#include "quasirigid/tiling.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace quasirigid {

struct RibbonShear {
    RibbonId ribbon = -1;
    JointId base = -1;
    std::vector<char> moving;   // per joint: 1 on the moving side of the cut
    Vec2 t;                     // unit velocity of the moving side
};

inline VelocityField shear_field(const RibbonShear& s) {
    VelocityField u(s.moving.size(), Vec2{0, 0});
    for (size_t j = 0; j < s.moving.size(); ++j)
        if (s.moving[j]) u[j] = s.t;
    return u;
}

// Joint nearest the mean of the tile centroids (ties to the lowest id).
inline JointId default_base_joint(const Tiling& tl) {
    Vec2 centroid{0, 0};
    for (TileId t = 0; t < tl.tile_count(); ++t) centroid += tl.tile_centroid(t);
    centroid = centroid / static_cast<double>(tl.tile_count());
    JointId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (JointId q = 0; q < tl.joint_count(); ++q) {
        double d = distance(tl.joints[q].pos, centroid);
        if (d < best_d - 1e-15) { best = q; best_d = d; }
    }
    return best;
}

inline TileId base_tile_for(const Tiling& tl, JointId base) {
    if (tl.joint_tiles[base].empty()) throw input_error("base joint lies on no tile");
    return *std::min_element(tl.joint_tiles[base].begin(), tl.joint_tiles[base].end());
}

// One shear per ribbon: remove the ribbon's internal edges, flood-fill the
// joint graph, fix the side holding the base joint, move the other side by
// the unit vector orthogonal to the internal edges.
inline std::vector<RibbonShear> build_ribbon_shears(const Tiling& tl,
                                                    const std::vector<Ribbon>& ribbons,
                                                    JointId base,
                                                    double residual_tol = 1e-10) {
    const int J = tl.joint_count();
    Framework fw = framework_from(tl);
    std::vector<RibbonShear> shears;
    shears.reserve(ribbons.size());

    std::vector<std::vector<std::pair<JointId, EdgeId>>> adj(J);
    for (EdgeId e = 0; e < tl.edge_count(); ++e) {
        adj[tl.edges[e].a].push_back({tl.edges[e].b, e});
        adj[tl.edges[e].b].push_back({tl.edges[e].a, e});
    }

    for (const Ribbon& rb : ribbons) {
        std::set<EdgeId> removed(rb.internal_edges.begin(), rb.internal_edges.end());

        std::vector<int> side(J, -1);
        int components = 0;
        for (JointId s = 0; s < J; ++s) {
            if (side[s] >= 0) continue;
            if (components >= 2) { ++components; break; }
            std::queue<JointId> q;
            q.push(s);
            side[s] = components;
            while (!q.empty()) {
                JointId a = q.front();
                q.pop();
                for (auto [b, e] : adj[a]) {
                    if (removed.count(e) || side[b] >= 0) continue;
                    side[b] = components;
                    q.push(b);
                }
            }
            ++components;
        }
        if (components != 2)
            throw geometry_error("ribbon " + std::to_string(rb.id) +
                                 " does not cut the patch into two sides; "
                                 "the patch is not a maximal simply connected patch");
        for (EdgeId e : rb.internal_edges)
            if (side[tl.edges[e].a] == side[tl.edges[e].b])
                throw geometry_error("ribbon " + std::to_string(rb.id) +
                                     " has an internal edge inside one side");

        RibbonShear sh;
        sh.ribbon = rb.id;
        sh.base = base;
        sh.t = rb.internal_dir.perp();
        sh.moving.assign(J, 0);
        int moving_side = 1 - side[base];
        for (JointId q = 0; q < J; ++q) sh.moving[q] = side[q] == moving_side ? 1 : 0;

        double res = flex_residual(fw, shear_field(sh));
        if (res > residual_tol)
            throw geometry_error("ribbon shear " + std::to_string(rb.id) +
                                 " violates the flex condition (residual " +
                                 std::to_string(res) + ")");
        shears.push_back(std::move(sh));
    }
    return shears;
}

struct Expansion {
    double alpha_x = 0.0;
    double alpha_y = 0.0;
    std::vector<double> ribbon_coeffs;   // by ribbon id
    double max_residual = 0.0;
};

struct ExpandOptions {
    double tol = 1e-8;               // relative residual tolerance
    std::vector<int> priority;       // BFS tie-break key per tile (default: id)
};

// Inductive expansion of a flex u over the shear basis. The patch must be
// maximal and simply connected, u a flex of its unbraced framework.
inline Expansion expand_flex(const Tiling& tl, const std::vector<Ribbon>& ribbons,
                             const std::vector<RibbonShear>& shears, const VelocityField& u,
                             TileId base_tile, JointId base_joint,
                             const ExpandOptions& opts = {}) {
    const int J = tl.joint_count();
    if (static_cast<int>(u.size()) != J)
        throw input_error("velocity field does not match the patch joints");
    if (shears.size() != ribbons.size())
        throw input_error("need one shear per ribbon");
    bool base_on_tile = false;
    for (JointId q : tl.tiles[base_tile].joints)
        if (q == base_joint) base_on_tile = true;
    if (!base_on_tile) throw input_error("base tile does not contain the base joint");

    auto of_tile = ribbons_of_tiles(tl, ribbons);
    std::vector<int> priority(tl.tile_count());
    if (opts.priority.empty()) {
        std::iota(priority.begin(), priority.end(), 0);
    } else {
        if (opts.priority.size() != static_cast<size_t>(tl.tile_count()))
            throw input_error("priority permutation does not match the tile count");
        priority = opts.priority;
    }

    double unorm = 0.0;
    for (const Vec2& v : u) unorm = std::max(unorm, v.norm());
    const double tol = opts.tol * std::max(1.0, unorm);

    Expansion ex;
    ex.ribbon_coeffs.assign(ribbons.size(), 0.0);

    VelocityField w = u;
    ex.alpha_x = w[base_joint].x;
    ex.alpha_y = w[base_joint].y;
    for (Vec2& v : w) v -= {ex.alpha_x, ex.alpha_y};

    std::vector<char> used(ribbons.size(), 0);

    auto use_ribbon = [&](RibbonId rho, TileId tile) {
        const RibbonShear& sh = shears[rho];
        RibbonId other = of_tile[tile][0] == rho ? of_tile[tile][1] : of_tile[tile][0];
        std::vector<JointId> candidates;
        for (JointId q : tl.tiles[tile].joints) {
            if (!sh.moving[q]) continue;
            if (!used[other] && shears[other].moving[q]) continue;
            candidates.push_back(q);
        }
        if (candidates.empty())
            throw geometry_error("expansion step found no usable joint on tile " +
                                 std::to_string(tile));
        std::sort(candidates.begin(), candidates.end());
        double alpha = dot(w[candidates[0]], sh.t);
        for (JointId q : candidates) {
            Vec2 r = w[q] - sh.t * alpha;
            if (r.norm() > tol)
                throw input_error(
                    "residual at joint " + std::to_string(q) + " is not a multiple of "
                    "the shear direction; the field is not a flex or the patch is "
                    "not maximal");
        }
        ex.ribbon_coeffs[rho] = alpha;
        used[rho] = 1;
        if (alpha != 0.0)
            for (JointId q = 0; q < J; ++q)
                if (sh.moving[q]) w[q] -= sh.t * alpha;
    };

    auto check_cancelled = [&](TileId tile) {
        for (JointId q : tl.tiles[tile].joints)
            if (w[q].norm() > tol)
                throw input_error("tile " + std::to_string(tile) +
                                  " on two used ribbons still carries a residual; "
                                  "the field is not a flex or the patch is not maximal");
    };

    // Seed on the base tile: zero the field on its four joints with its two
    // ribbons, lower priority first.
    {
        RibbonId ra = of_tile[base_tile][0], rb = of_tile[base_tile][1];
        if (priority[ra] > priority[rb]) std::swap(ra, rb);
        use_ribbon(ra, base_tile);
        use_ribbon(rb, base_tile);
        check_cancelled(base_tile);
    }

    // Breadth-first over contiguous tiles; each new tile meets at most one
    // unused ribbon (its ribbon through the shared edge is already used).
    std::vector<char> seen(tl.tile_count(), 0);
    seen[base_tile] = 1;
    std::vector<TileId> wave = {base_tile};
    while (!wave.empty()) {
        std::vector<TileId> next;
        for (TileId t : wave)
            for (EdgeId e : tl.tile_edges[t])
                for (TileId o : tl.edge_tiles[e])
                    if (!seen[o]) {
                        seen[o] = 1;
                        next.push_back(o);
                    }
        std::sort(next.begin(), next.end(),
                  [&](TileId a, TileId b) { return priority[a] < priority[b]; });
        for (TileId t : next) {
            RibbonId r0 = of_tile[t][0], r1 = of_tile[t][1];
            bool u0 = used[r0], u1 = used[r1];
            if (!u0 && !u1)
                throw geometry_error("tile " + std::to_string(t) +
                                     " introduces two unused ribbons; the patch is "
                                     "not maximal");
            if (!u0) use_ribbon(r0, t);
            else if (!u1) use_ribbon(r1, t);
            else check_cancelled(t);
        }
        wave = std::move(next);
    }

    for (size_t r = 0; r < ribbons.size(); ++r)
        if (!used[r])
            throw geometry_error("ribbon " + std::to_string(r) +
                                 " was never reached; the patch is disconnected");

    for (const Vec2& v : w) ex.max_residual = std::max(ex.max_residual, v.norm());
    if (ex.max_residual > tol)
        throw input_error("expansion left a residual of " +
                          std::to_string(ex.max_residual) +
                          "; the field is not a flex or the patch is not maximal");
    return ex;
}

// alpha_x u^x + alpha_y u^y + sum alpha_rho u^rho.
inline VelocityField reconstruct(const Tiling& tl, const std::vector<RibbonShear>& shears,
                                 const Expansion& ex) {
    VelocityField u(tl.joint_count(), Vec2{ex.alpha_x, ex.alpha_y});
    for (size_t r = 0; r < shears.size(); ++r) {
        double a = ex.ribbon_coeffs[r];
        if (a == 0.0) continue;
        for (JointId q = 0; q < tl.joint_count(); ++q)
            if (shears[r].moving[q]) u[q] += shears[r].t * a;
    }
    return u;
}

// --- localisation ---------------------------------------------------------

struct LocalisationVerdict {
    bool h_localised = false;   // pure: no translation part, support near H
    bool bulk_shear = false;    // support near H, translation part arbitrary
};

// A ribbon is H-localised within width c when all its tile centroids lie
// within distance c of the line through the origin with direction h.
inline bool ribbon_h_localised(const Tiling& tl, const Ribbon& rb, Vec2 h, double c) {
    Vec2 nh = h.normalized().perp();
    for (TileId t : rb.tiles)
        if (std::abs(dot(tl.tile_centroid(t), nh)) > c) return false;
    return true;
}

inline LocalisationVerdict classify_localised(const Expansion& ex, const Tiling& tl,
                                              const std::vector<Ribbon>& ribbons, Vec2 h,
                                              double c, double coeff_tol = 1e-9) {
    double max_coeff = std::max(std::abs(ex.alpha_x), std::abs(ex.alpha_y));
    for (double a : ex.ribbon_coeffs) max_coeff = std::max(max_coeff, std::abs(a));
    const double cut = coeff_tol * std::max(1.0, max_coeff);

    bool support_ok = true;
    for (size_t r = 0; r < ex.ribbon_coeffs.size(); ++r)
        if (std::abs(ex.ribbon_coeffs[r]) > cut && !ribbon_h_localised(tl, ribbons[r], h, c))
            support_ok = false;

    LocalisationVerdict v;
    v.bulk_shear = support_ok;
    v.h_localised = support_ok && std::abs(ex.alpha_x) <= cut && std::abs(ex.alpha_y) <= cut;
    return v;
}

// Default localisation width: 1.5 * max tile diameter.
inline double default_localisation_width(const Tiling& tl) {
    return 1.5 * tl.max_tile_diameter();
}

// --- ribbon directions ------------------------------------------------------

// Direction of the line localising every grid-i ribbon: the frequency-weighted
// sum of the signed dual edge steps contributed by crossings with the other
// grids.
inline Vec2 ribbon_direction(const MultigridSpec& spec, int i) {
    auto frames = grid_frames(spec);
    const int r = spec.size();
    double weight_sum = 0.0;
    std::vector<double> inv_beta(r, 0.0);
    for (int j = 0; j < r; ++j) {
        if (j == i) continue;
        double slope = dot(frames[j].normal, frames[i].direction);
        if (std::abs(slope) < 1e-15)
            throw geometry_error("grids " + std::to_string(i + 1) + " and " +
                                 std::to_string(j + 1) + " are parallel");
        inv_beta[j] = std::abs(slope);
        weight_sum += inv_beta[j];
    }
    Vec2 v{0, 0};
    for (int j = 0; j < r; ++j) {
        if (j == i) continue;
        double sigma = dot(frames[j].normal, frames[i].direction) > 0 ? 1.0 : -1.0;
        v += frames[j].edge * (sigma * inv_beta[j] / weight_sum);
    }
    return canonical_sign(v.normalized());
}

// Angles (mod pi) of the distinct ribbon directions; for multigrid tilings
// this is the ribbon figure and equals the finite-patch LFF and BSF.
inline std::vector<double> ribbon_figure(const MultigridSpec& spec, double tol = 1e-9) {
    std::vector<double> angles;
    for (int i = 0; i < spec.size(); ++i)
        angles.push_back(angle_mod_pi(ribbon_direction(spec, i)));
    std::sort(angles.begin(), angles.end());
    std::vector<double> out;
    for (double a : angles) {
        bool dup = false;
        for (double b : out)
            if (std::abs(a - b) < tol || std::abs(a - b - std::numbers::pi) < tol ||
                std::abs(a - b + std::numbers::pi) < tol)
                dup = true;
        if (!dup) out.push_back(a);
    }
    return out;
}

} // namespace quasirigid
