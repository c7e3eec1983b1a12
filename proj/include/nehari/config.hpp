#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nehari/phi.hpp"

namespace nehari {

/// Parsed run configuration. Sectioned key = value text; every key is
/// validated on parse and unknown keys are rejected with the line number.
struct RunConfig {
    // [phi]
    std::string phi_family = "power"; ///< power | double_power | tabulated
    double phi_p = 2.0;
    double phi_q = 3.0;           ///< double_power only
    std::string phi_table_file;   ///< tabulated only
    SamplingWindow window;

    // [problem]
    int space_dim = 4;
    std::optional<double> crit_exp; ///< default: critical exponent

    // [mesh]
    int mesh_dim = 1;
    double extent_x = 1.0, extent_y = 1.0;
    int cells_x = 128, cells_y = 32;

    // [source]
    std::string source_shape = "bump"; ///< zero | bump | file
    double bump_center_x = 0.5, bump_center_y = 0.5, bump_width = 0.15;
    std::string source_file;
    std::optional<double> target_fraction; ///< of Lambda (exclusive with amplitude)
    std::optional<double> amplitude;       ///< absolute multiplier

    // [solver]
    int starts = 8;
    int budget = 5000;
    double tol_res = 1e-6;
    double tol_step = 1e-10;
    double armijo = 1e-4;

    // [run]
    std::uint64_t seed = 42;
    std::string output_dir = "out";
    int constants_starts = 8;
    int sweep_directions = 100;

    // [fiber]
    std::string fiber_direction = "fundamental"; ///< fundamental | sample | file
    std::string fiber_file;
    double fiber_t_lo = 1e-3, fiber_t_hi = 1e3;
    int fiber_points = 200;
};

/// Parse a config file; throws ConfigError carrying the offending line.
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Parse config text directly (used by tests and error reporting).
[[nodiscard]] RunConfig parse_config(const std::string& text);

/// Build the generator described by the [phi] section (reads the table
/// file for the tabulated family).
[[nodiscard]] PhiSpec make_phi(const RunConfig& cfg);

/// Two-column "t phi" ASCII table ('#' comments allowed).
[[nodiscard]] std::pair<std::vector<double>, std::vector<double>>
load_phi_table(const std::string& path);

} // namespace nehari
