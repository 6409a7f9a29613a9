#pragma once

#include "quasirigid/dualize.hpp"
#include "quasirigid/geometry.hpp"
#include "quasirigid/tiling.hpp"

#include <array>

namespace testutil {

inline const std::array<double, 5>& penta_gammas() {
    static const std::array<double, 5> g = {0.1, 0.15, 0.2, 0.25, -0.7};
    return g;
}

inline const std::array<double, 4>& tetra_gammas() {
    // Generic offsets summing to zero.
    static const std::array<double, 4> g = {0.11, 0.23, 0.36, -0.7};
    return g;
}

inline quasirigid::Tiling penta_tiling(double window) {
    return quasirigid::dualize(quasirigid::pentagrid_preset(penta_gammas()), window);
}

inline quasirigid::Tiling tetra_tiling(double window) {
    return quasirigid::dualize(quasirigid::tetragrid_preset(tetra_gammas()), window);
}

// Maximal working patch of a pentagrid window, as a standalone tiling. Small
// unit-test windows use a conservative inner fraction.
inline quasirigid::Tiling penta_patch(double window, double fraction = 0.7) {
    auto tl = penta_tiling(window);
    return quasirigid::restrict_tiling(
        tl, quasirigid::default_working_patch(tl, window, fraction));
}

inline quasirigid::Tiling tetra_patch(double window, double fraction = 0.7) {
    auto tl = tetra_tiling(window);
    return quasirigid::restrict_tiling(
        tl, quasirigid::default_working_patch(tl, window, fraction));
}

} // namespace testutil
