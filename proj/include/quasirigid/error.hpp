#pragma once

#include <stdexcept>
#include <string>

namespace quasirigid {

// Bad user input: malformed documents, invalid specs, unknown options.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A construction failed geometrically (irregular multigrid, broken tiling,
// patch closure escaping its window, ...).
struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

// A rank decision could not be certified by the spectral-gap policy.
struct ill_conditioned_error : std::runtime_error {
    explicit ill_conditioned_error(const std::string& what) : std::runtime_error(what) {}
};

// Point sits on a grid line, so its band index is ambiguous.
struct on_line_error : geometry_error {
    on_line_error(int grid, long long line)
        : geometry_error("point lies on line " + std::to_string(line) +
                         " of grid " + std::to_string(grid + 1)),
          grid_id(grid), line_index(line) {}
    int grid_id;
    long long line_index;
};

} // namespace quasirigid
