// Numerical rigidity oracle: rigidity matrices of (braced) parallelogram
// frameworks, SVD kernel bases, and gap-certified rank decisions.
#pragma once

#include "quasirigid/error.hpp"
#include "quasirigid/tiling.hpp"
#include "quasirigid/vec2.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <complex>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace quasirigid {

using VelocityField = std::vector<Vec2>;            // one velocity per joint

struct CVec2 {
    std::complex<double> x{0.0, 0.0};
    std::complex<double> y{0.0, 0.0};
};
using ComplexField = std::vector<CVec2>;

struct Framework {
    std::vector<Vec2> joints;
    std::vector<std::pair<JointId, JointId>> bars;   // a < b, unique
};

// Bars = tile edges of the patch plus one diagonal per braced tile, running
// from the tile's lowest-id joint to the opposite joint.
inline Framework framework_from(const Tiling& tl, const std::vector<TileId>& braced = {}) {
    Framework fw;
    fw.joints.reserve(tl.joints.size());
    for (const Joint& j : tl.joints) fw.joints.push_back(j.pos);

    std::set<std::pair<JointId, JointId>> seen;
    for (const Edge& e : tl.edges) {
        fw.bars.emplace_back(e.a, e.b);
        seen.insert({e.a, e.b});
    }
    for (TileId t : braced) {
        if (t < 0 || t >= tl.tile_count())
            throw input_error("braced tile " + std::to_string(t) + " is outside the patch");
        const auto& q = tl.tiles[t].joints;
        int lo = 0;
        for (int s = 1; s < 4; ++s)
            if (q[s] < q[lo]) lo = s;
        auto bar = std::minmax(q[lo], q[(lo + 2) % 4]);
        if (!seen.insert(bar).second)
            throw input_error("duplicate brace on tile " + std::to_string(t));
        fw.bars.push_back(bar);
    }
    return fw;
}

// Row per bar vw: (p_v - p_w) in v's column block, the negative in w's.
inline Eigen::MatrixXd rigidity_matrix(const Framework& fw) {
    const int B = static_cast<int>(fw.bars.size());
    const int J = static_cast<int>(fw.joints.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(B, 2 * J);
    for (int r = 0; r < B; ++r) {
        auto [v, w] = fw.bars[r];
        Vec2 d = fw.joints[v] - fw.joints[w];
        if (d.norm() < 1e-12)
            throw geometry_error("bar " + std::to_string(r) + " has zero length");
        M(r, 2 * v) = d.x;
        M(r, 2 * v + 1) = d.y;
        M(r, 2 * w) = -d.x;
        M(r, 2 * w + 1) = -d.y;
    }
    return M;
}

struct RankPolicy {
    double rel_tol = 1e-10;   // threshold = rel_tol * sigma_max * max(rows, cols)
    double gap_min = 1e3;     // required ratio smallest-kept / largest-dropped
};

struct FlexSpace {
    int dimension = 0;
    std::vector<VelocityField> basis;    // orthonormal kernel basis
    double sigma_max = 0.0;
    double smallest_retained = std::numeric_limits<double>::infinity();
    double largest_discarded = 0.0;
    double gap_ratio = std::numeric_limits<double>::infinity();
    bool ill_conditioned = false;        // gap certificate failed: no verdict
};

namespace detail {

// Divide-and-conquer SVD; jobz 'N' for values only, 'A' for the full right
// factor (rows of vt are right singular vectors).
inline void dense_svd(Eigen::MatrixXd& a, std::vector<double>& s, Eigen::MatrixXd* vt) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    s.assign(std::min(m, n), 0.0);
    int info;
    if (vt) {
        Eigen::MatrixXd u(m, m);
        vt->resize(n, n);
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m, n, a.data(), m, s.data(),
                              u.data(), m, vt->data(), n);
    } else {
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(),
                              nullptr, m, nullptr, n);
    }
    if (info != 0)
        throw std::runtime_error("SVD failed to converge (dgesdd info=" +
                                 std::to_string(info) + ")");
}

} // namespace detail

// Kernel of the rigidity matrix. Rank is decided by the relative singular
// value threshold; the verdict is refused (ill_conditioned) when the spectrum
// has no certified gap at the cut.
inline FlexSpace flex_space(const Framework& fw, const RankPolicy& policy = {},
                            bool with_basis = true) {
    const int J = static_cast<int>(fw.joints.size());
    const int n = 2 * J;
    const int B = static_cast<int>(fw.bars.size());
    FlexSpace out;

    if (B == 0) {
        out.dimension = n;
        if (with_basis)
            for (int c = 0; c < n; ++c) {
                VelocityField f(J, Vec2{0, 0});
                if (c % 2 == 0) f[c / 2].x = 1.0;
                else f[c / 2].y = 1.0;
                out.basis.push_back(std::move(f));
            }
        return out;
    }

    Eigen::MatrixXd M = rigidity_matrix(fw);
    std::vector<double> s;
    Eigen::MatrixXd vt;
    detail::dense_svd(M, s, with_basis ? &vt : nullptr);

    out.sigma_max = s.empty() ? 0.0 : s[0];
    const double threshold = policy.rel_tol * out.sigma_max * std::max(B, n);
    int retained = 0;
    while (retained < static_cast<int>(s.size()) && s[retained] > threshold) ++retained;
    out.dimension = n - retained;
    if (retained > 0) out.smallest_retained = s[retained - 1];
    if (retained < static_cast<int>(s.size())) out.largest_discarded = s[retained];
    if (out.largest_discarded > 0.0)
        out.gap_ratio = out.smallest_retained / out.largest_discarded;
    out.ill_conditioned = out.gap_ratio < policy.gap_min;

    if (with_basis && !out.ill_conditioned) {
        for (int r = retained; r < n; ++r) {
            VelocityField f(J);
            for (int j = 0; j < J; ++j) f[j] = {vt(r, 2 * j), vt(r, 2 * j + 1)};
            out.basis.push_back(std::move(f));
        }
    }
    return out;
}

// Max over bars of the first-order length change, normalised by bar length
// and by the largest joint speed.
inline double flex_residual(const Framework& fw, const VelocityField& u) {
    if (u.size() != fw.joints.size())
        throw input_error("velocity field does not match the framework joints");
    double unorm = 0.0;
    for (const Vec2& v : u) unorm = std::max(unorm, v.norm());
    if (unorm == 0.0) return 0.0;
    double worst = 0.0;
    for (auto [v, w] : fw.bars) {
        Vec2 d = fw.joints[v] - fw.joints[w];
        double r = std::abs(dot(u[v] - u[w], d)) / (d.norm() * unorm);
        worst = std::max(worst, r);
    }
    return worst;
}

inline double flex_residual(const Framework& fw, const ComplexField& u) {
    if (u.size() != fw.joints.size())
        throw input_error("velocity field does not match the framework joints");
    double unorm = 0.0;
    for (const CVec2& v : u)
        unorm = std::max(unorm, std::sqrt(std::norm(v.x) + std::norm(v.y)));
    if (unorm == 0.0) return 0.0;
    double worst = 0.0;
    for (auto [v, w] : fw.bars) {
        Vec2 d = fw.joints[v] - fw.joints[w];
        std::complex<double> inner = (u[v].x - u[w].x) * d.x + (u[v].y - u[w].y) * d.y;
        worst = std::max(worst, std::abs(inner) / (d.norm() * unorm));
    }
    return worst;
}

// True iff the flex space is exactly the rigid motions.
inline bool is_infinitesimally_rigid(const Framework& fw, const RankPolicy& policy = {}) {
    const int J = static_cast<int>(fw.joints.size());
    if (J < 2) throw input_error("framework needs at least 2 joints");

    Vec2 mean{0, 0};
    for (const Vec2& p : fw.joints) mean += p;
    mean = mean / static_cast<double>(J);
    double xx = 0, xy = 0, yy = 0, scale = 0;
    for (const Vec2& p : fw.joints) {
        Vec2 d = p - mean;
        xx += d.x * d.x;
        xy += d.x * d.y;
        yy += d.y * d.y;
        scale = std::max(scale, d.squared_norm());
    }
    double tr = xx + yy, det = xx * yy - xy * xy;
    double lam_min = tr / 2.0 - std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    if (lam_min < 1e-18 * std::max(1.0, scale) * J)
        throw geometry_error("joints are collinear; the rigid-motion space degenerates");

    FlexSpace fs = flex_space(fw, policy, false);
    if (fs.ill_conditioned)
        throw ill_conditioned_error("rank decision failed the spectral-gap certificate");
    return fs.dimension == 3;
}

} // namespace quasirigid
