// Regular multigrids: line arrangements made of r affine images of the
// integer family of vertical lines, with regularity validation, band
// indices and intersection enumeration.
#pragma once

#include "quasirigid/error.hpp"
#include "quasirigid/vec2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace quasirigid {

// Image of the vertical integer lines {x = m} under z -> linear*z + translation.
struct AffineGrid {
    Mat2 linear;
    Vec2 translation;
};

struct MultigridSpec {
    std::vector<AffineGrid> grids;
    std::vector<double> weights;          // dual edge lengths, one per grid
    bool offset_sum_warning = false;      // preset precondition relaxed

    int size() const { return static_cast<int>(grids.size()); }
};

// Integer band coordinates of an arrangement face (one entry per grid).
struct IndexVector {
    std::vector<int> c;

    IndexVector() = default;
    explicit IndexVector(std::vector<int> v) : c(std::move(v)) {}

    int size() const { return static_cast<int>(c.size()); }
    int& operator[](int i) { return c[i]; }
    int operator[](int i) const { return c[i]; }
    auto operator<=>(const IndexVector&) const = default;

    IndexVector shifted(int coord, int delta) const {
        IndexVector m = *this;
        m.c[coord] += delta;
        return m;
    }
};

// Cached per-grid geometry. With L the linear part and t the translation,
// the band coordinate of z is f(z) = n.z - n.t where n is the first row of
// L^-1; line k of the grid is the level set f = k.
struct GridFrame {
    Vec2 normal;      // n, gradient of f; |n| = 1/spacing
    double offset;    // n.t
    Vec2 direction;   // unit vector along the lines, L*(0,1) normalised
    Vec2 edge;        // dual edge vector e = weight * n/|n|
    double spacing;   // distance between consecutive lines
};

inline GridFrame grid_frame(const MultigridSpec& spec, int j) {
    const AffineGrid& g = spec.grids[j];
    double det = g.linear.det();
    if (!std::isfinite(det) || det <= 0.0)
        throw input_error("grid " + std::to_string(j + 1) +
                          " has a degenerate or orientation-reversing linear part");
    GridFrame f;
    f.normal = {g.linear.d / det, -g.linear.b / det};
    f.offset = dot(f.normal, g.translation);
    f.direction = Vec2{g.linear.b, g.linear.d}.normalized();
    double nn = f.normal.norm();
    f.spacing = 1.0 / nn;
    f.edge = f.normal * (spec.weights[j] / nn);
    return f;
}

inline std::vector<GridFrame> grid_frames(const MultigridSpec& spec) {
    std::vector<GridFrame> out;
    out.reserve(spec.grids.size());
    for (int j = 0; j < spec.size(); ++j) out.push_back(grid_frame(spec, j));
    return out;
}

// Continuous band coordinate of z in grid j.
inline double grid_coordinate(const GridFrame& f, Vec2 z) {
    return dot(f.normal, z) - f.offset;
}

// Unique m with z in the half-open band [m, m+1) of grid j. Throws
// on_line_error when z sits on a line within eps (in band coordinates).
inline int grid_index(const GridFrame& f, int j, Vec2 z, double eps = 1e-12) {
    double g = grid_coordinate(f, z);
    double r = std::round(g);
    if (std::abs(g - r) < eps * std::max(1.0, std::abs(g)))
        throw on_line_error(j, static_cast<long long>(r));
    return static_cast<int>(std::floor(g));
}

inline int grid_index(const MultigridSpec& spec, int j, Vec2 z, double eps = 1e-12) {
    return grid_index(grid_frame(spec, j), j, z, eps);
}

// --- presets ---------------------------------------------------------------

// Five grids rotated clockwise by multiples of 2*pi/5, offsets gamma along x.
inline MultigridSpec pentagrid_preset(const std::array<double, 5>& gammas) {
    MultigridSpec spec;
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) {
        AffineGrid g;
        g.linear = Mat2::rotation_cw(2.0 * std::numbers::pi * k / 5.0);
        g.translation = {gammas[k], 0.0};
        spec.grids.push_back(g);
        spec.weights.push_back(1.0);
        sum += gammas[k];
    }
    spec.offset_sum_warning = std::abs(sum) > 1e-9;
    return spec;
}

// Four grids rotated clockwise by multiples of pi/4.
inline MultigridSpec tetragrid_preset(const std::array<double, 4>& gammas) {
    MultigridSpec spec;
    for (int k = 0; k < 4; ++k) {
        AffineGrid g;
        g.linear = Mat2::rotation_cw(std::numbers::pi * k / 4.0);
        g.translation = {gammas[k], 0.0};
        spec.grids.push_back(g);
        spec.weights.push_back(1.0);
    }
    return spec;
}

// Two orthogonal unit grids; dual tiling is the unit square grid.
inline MultigridSpec orthogrid_preset(Vec2 offset = {0.0, 0.0}) {
    MultigridSpec spec;
    AffineGrid vertical;           // lines x = m + offset.x, index grows with x
    vertical.translation = {offset.x, 0.0};
    AffineGrid horizontal;         // lines y = m + offset.y, index grows with y
    horizontal.linear = {0.0, -1.0, 1.0, 0.0};
    horizontal.translation = {0.0, offset.y};
    spec.grids = {vertical, horizontal};
    spec.weights = {1.0, 1.0};
    return spec;
}

// --- regularity ------------------------------------------------------------

struct TriplePoint {
    int grid_a, grid_b, grid_c;
    long line_a, line_b, line_c;
    Vec2 point;          // intersection of (grid_a,line_a) and (grid_b,line_b)
    double separation;   // distance from point to the third line
};

struct RegularityReport {
    bool regular = false;
    bool fragile = false;                         // near-triple inside 1000*eps
    std::vector<std::pair<int, int>> parallel_pairs;
    std::vector<TriplePoint> triples;             // separation < eps
    std::vector<TriplePoint> near_triples;        // separation < 1000*eps
    double min_angle = std::numeric_limits<double>::infinity();
    double min_spacing = std::numeric_limits<double>::infinity();
    double min_triple_separation = std::numeric_limits<double>::infinity();
    double window_radius = 0.0;
    double eps = 0.0;
};

// Integer line indices of grid j whose lines meet the open disc of radius W.
inline std::pair<long, long> line_index_range(const GridFrame& f, double window_radius) {
    double f0 = -f.offset;  // band coordinate of the origin
    double halfwidth = window_radius / f.spacing;
    long lo = static_cast<long>(std::ceil(f0 - halfwidth));
    long hi = static_cast<long>(std::floor(f0 + halfwidth));
    return {lo, hi};
}

// Intersection point of line (i,k) and line (j,l); the lines must not be parallel.
inline Vec2 line_pair_point(const GridFrame& fi, long k, const GridFrame& fj, long l) {
    // Solve n_i.z = k + c_i, n_j.z = l + c_j.
    double det = cross(fi.normal, fj.normal);
    double ri = k + fi.offset, rj = l + fj.offset;
    return {(ri * fj.normal.y - rj * fi.normal.y) / det,
            (rj * fi.normal.x - ri * fj.normal.x) / det};
}

// Scans the window for parallel grid pairs and (near-)triple points.
// eps <= 0 selects the default 1e-9 * window_radius.
inline RegularityReport validate_regular(const MultigridSpec& spec, double window_radius,
                                         double eps = -1.0) {
    if (spec.size() < 2) throw input_error("multigrid needs at least 2 grids");
    if (static_cast<int>(spec.weights.size()) != spec.size())
        throw input_error("weights count does not match grid count");
    for (double w : spec.weights)
        if (!(w > 0.0)) throw input_error("grid weights must be strictly positive");
    if (!(window_radius > 0.0)) throw input_error("window radius must be positive");

    RegularityReport rep;
    rep.window_radius = window_radius;
    rep.eps = eps > 0.0 ? eps : 1e-9 * window_radius;

    const int r = spec.size();
    auto frames = grid_frames(spec);

    constexpr double parallel_sin_tol = 1e-12;
    for (int i = 0; i < r; ++i) {
        rep.min_spacing = std::min(rep.min_spacing, frames[i].spacing);
        for (int j = i + 1; j < r; ++j) {
            double angle = line_angle_between(frames[i].direction, frames[j].direction);
            if (std::sin(angle) < parallel_sin_tol) {
                rep.parallel_pairs.emplace_back(i, j);
            } else {
                rep.min_angle = std::min(rep.min_angle, angle);
            }
        }
    }
    if (!rep.parallel_pairs.empty()) {
        rep.regular = false;
        return rep;
    }

    // For every in-window pairwise intersection, measure the distance to the
    // nearest line of every third grid.
    for (int i = 0; i < r; ++i) {
        auto [klo, khi] = line_index_range(frames[i], window_radius);
        for (int j = i + 1; j < r; ++j) {
            for (long k = klo; k <= khi; ++k) {
                auto [llo, lhi] = line_index_range(frames[j], window_radius);
                for (long l = llo; l <= lhi; ++l) {
                    Vec2 x = line_pair_point(frames[i], k, frames[j], l);
                    if (x.norm() >= window_radius) continue;   // open disc
                    for (int h = 0; h < r; ++h) {
                        if (h == i || h == j) continue;
                        double g = grid_coordinate(frames[h], x);
                        double sep = std::abs(g - std::round(g)) * frames[h].spacing;
                        rep.min_triple_separation = std::min(rep.min_triple_separation, sep);
                        if (sep < 1000.0 * rep.eps) {
                            TriplePoint t{i, j, h, k, l,
                                          static_cast<long>(std::llround(g)), x, sep};
                            if (sep < rep.eps) rep.triples.push_back(t);
                            else rep.near_triples.push_back(t);
                        }
                    }
                }
            }
        }
    }
    rep.regular = rep.triples.empty();
    rep.fragile = rep.regular && !rep.near_triples.empty();
    return rep;
}

// --- intersections along one line -------------------------------------------

struct GridIntersection {
    int grid_a, grid_b;     // grid pair, grid_a < grid_b
    long line_a, line_b;    // line indices in the respective grids
    Vec2 point;
    double arclength;       // parameter s along the host line of the scan
};

struct LineScan {
    int grid = 0;           // host grid
    long line = 0;          // host line index
    Vec2 line_point;        // point of the line closest to the origin
    Vec2 line_direction;    // unit vector, orientation of increasing s
    std::vector<GridIntersection> points;   // sorted by arclength
    struct PairLaw {
        double beta;        // spacing of same-pair intersections along the line
        double gamma;       // phase, smallest non-negative arclength member
    };
    std::map<int, PairLaw> laws;            // per foreign grid
};

// All intersections of line (i, k) with lines of the other grids inside the
// disc of radius window_radius, sorted along the line.
inline LineScan intersections_on_line(const MultigridSpec& spec, int i, long k,
                                      double window_radius) {
    auto frames = grid_frames(spec);
    const GridFrame& fi = frames[i];

    LineScan scan;
    scan.grid = i;
    scan.line = k;
    scan.line_point = fi.normal * ((k + fi.offset) / fi.normal.squared_norm());
    scan.line_direction = fi.direction;

    double dist = scan.line_point.norm();
    if (dist >= window_radius) return scan;   // line misses the window
    double smax = std::sqrt(window_radius * window_radius - dist * dist);

    for (int j = 0; j < spec.size(); ++j) {
        if (j == i) continue;
        double slope = dot(frames[j].normal, fi.direction);
        if (std::abs(slope) < 1e-15)
            throw geometry_error("grids " + std::to_string(i + 1) + " and " +
                                 std::to_string(j + 1) + " are parallel");
        double f0 = grid_coordinate(frames[j], scan.line_point);
        double beta = 1.0 / std::abs(slope);
        double s0 = -f0 / slope;                       // arclength of line l = 0
        LineScan::PairLaw law;
        law.beta = beta;
        law.gamma = s0 - beta * std::floor(s0 / beta);
        scan.laws[j] = law;

        double a = f0 - std::abs(slope) * smax;
        double b = f0 + std::abs(slope) * smax;
        long llo = static_cast<long>(std::ceil(a));
        long lhi = static_cast<long>(std::floor(b));
        for (long l = llo; l <= lhi; ++l) {
            double s = (l - f0) / slope;
            if (std::abs(s) >= smax) continue;   // open disc
            GridIntersection gi;
            gi.point = scan.line_point + fi.direction * s;
            gi.arclength = s;
            if (i < j) {
                gi.grid_a = i; gi.grid_b = j; gi.line_a = k; gi.line_b = l;
            } else {
                gi.grid_a = j; gi.grid_b = i; gi.line_a = l; gi.line_b = k;
            }
            scan.points.push_back(gi);
        }
    }
    std::sort(scan.points.begin(), scan.points.end(),
              [](const GridIntersection& a, const GridIntersection& b) {
                  return a.arclength < b.arclength;
              });
    return scan;
}

} // namespace quasirigid
