#include "nehari/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

[[nodiscard]] std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    int line_no = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(what, line_no);
    }

    [[nodiscard]] double to_double(const std::string& v) const {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) fail("trailing characters after number '" + v + "'");
            return d;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
    }

    [[nodiscard]] int to_int(const std::string& v) const {
        const double d = to_double(v);
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d) fail("expected an integer, got '" + v + "'");
        return i;
    }

    [[nodiscard]] std::uint64_t to_u64(const std::string& v) const {
        std::uint64_t out = 0;
        const auto [p, ec] =
            std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || p != v.data() + v.size()) {
            fail("expected a nonnegative integer, got '" + v + "'");
        }
        return out;
    }
};

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    Parser p;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    while (std::getline(in, raw)) {
        ++p.line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "phi" && section != "problem" && section != "mesh" &&
                section != "source" && section != "solver" &&
                section != "run" && section != "fiber") {
                p.fail("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (val.empty()) p.fail("empty value for '" + key + "'");
        if (section.empty()) p.fail("key '" + key + "' outside any section");

        if (section == "phi") {
            if (key == "family") {
                if (val != "power" && val != "double_power" && val != "tabulated") {
                    p.fail("family must be power, double_power or tabulated");
                }
                cfg.phi_family = val;
            } else if (key == "p") {
                cfg.phi_p = p.to_double(val);
            } else if (key == "q") {
                cfg.phi_q = p.to_double(val);
            } else if (key == "table_file") {
                cfg.phi_table_file = val;
            } else if (key == "t_min") {
                cfg.window.t_min = p.to_double(val);
            } else if (key == "t_max") {
                cfg.window.t_max = p.to_double(val);
            } else if (key == "points") {
                cfg.window.points = p.to_int(val);
            } else {
                p.fail("unknown key '" + key + "' in [phi]");
            }
        } else if (section == "problem") {
            if (key == "space_dim") {
                cfg.space_dim = p.to_int(val);
            } else if (key == "crit_exp") {
                cfg.crit_exp = p.to_double(val);
            } else {
                p.fail("unknown key '" + key + "' in [problem]");
            }
        } else if (section == "mesh") {
            if (key == "dim") {
                cfg.mesh_dim = p.to_int(val);
                if (cfg.mesh_dim != 1 && cfg.mesh_dim != 2) {
                    p.fail("mesh dim must be 1 or 2");
                }
            } else if (key == "extent_x") {
                cfg.extent_x = p.to_double(val);
            } else if (key == "extent_y") {
                cfg.extent_y = p.to_double(val);
            } else if (key == "cells_x") {
                cfg.cells_x = p.to_int(val);
            } else if (key == "cells_y") {
                cfg.cells_y = p.to_int(val);
            } else {
                p.fail("unknown key '" + key + "' in [mesh]");
            }
        } else if (section == "source") {
            if (key == "shape") {
                if (val != "zero" && val != "bump" && val != "file") {
                    p.fail("shape must be zero, bump or file");
                }
                cfg.source_shape = val;
            } else if (key == "center_x") {
                cfg.bump_center_x = p.to_double(val);
            } else if (key == "center_y") {
                cfg.bump_center_y = p.to_double(val);
            } else if (key == "width") {
                cfg.bump_width = p.to_double(val);
            } else if (key == "file") {
                cfg.source_file = val;
            } else if (key == "target_fraction") {
                cfg.target_fraction = p.to_double(val);
            } else if (key == "amplitude") {
                cfg.amplitude = p.to_double(val);
            } else {
                p.fail("unknown key '" + key + "' in [source]");
            }
        } else if (section == "solver") {
            if (key == "starts") {
                cfg.starts = p.to_int(val);
            } else if (key == "budget") {
                cfg.budget = p.to_int(val);
            } else if (key == "tol_res") {
                cfg.tol_res = p.to_double(val);
            } else if (key == "tol_step") {
                cfg.tol_step = p.to_double(val);
            } else if (key == "armijo") {
                cfg.armijo = p.to_double(val);
            } else {
                p.fail("unknown key '" + key + "' in [solver]");
            }
        } else if (section == "run") {
            if (key == "seed") {
                cfg.seed = p.to_u64(val);
            } else if (key == "output_dir") {
                cfg.output_dir = val;
            } else if (key == "constants_starts") {
                cfg.constants_starts = p.to_int(val);
            } else if (key == "sweep_directions") {
                cfg.sweep_directions = p.to_int(val);
            } else {
                p.fail("unknown key '" + key + "' in [run]");
            }
        } else { // fiber
            if (key == "direction") {
                if (val != "fundamental" && val != "sample" && val != "file") {
                    p.fail("direction must be fundamental, sample or file");
                }
                cfg.fiber_direction = val;
            } else if (key == "file") {
                cfg.fiber_file = val;
            } else if (key == "t_lo") {
                cfg.fiber_t_lo = p.to_double(val);
            } else if (key == "t_hi") {
                cfg.fiber_t_hi = p.to_double(val);
            } else if (key == "points") {
                cfg.fiber_points = p.to_int(val);
            } else {
                p.fail("unknown key '" + key + "' in [fiber]");
            }
        }
    }

    // Cross-field validation; reported with line 0 (whole-file property).
    const auto whole = [](const std::string& what) {
        throw ConfigError(what, 0);
    };
    if (cfg.phi_family == "power" && !(cfg.phi_p > 1.0)) {
        whole("[phi] power family needs p > 1");
    }
    if (cfg.phi_family == "double_power" &&
        !(cfg.phi_p > 1.0 && cfg.phi_q >= cfg.phi_p)) {
        whole("[phi] double_power family needs 1 < p <= q");
    }
    if (cfg.phi_family == "tabulated" && cfg.phi_table_file.empty()) {
        whole("[phi] tabulated family needs table_file");
    }
    if (cfg.space_dim < 2) whole("[problem] space_dim must be >= 2");
    if (cfg.crit_exp && !(*cfg.crit_exp > 1.0)) {
        whole("[problem] crit_exp must exceed 1");
    }
    if (!(cfg.extent_x > 0.0) || (cfg.mesh_dim == 2 && !(cfg.extent_y > 0.0))) {
        whole("[mesh] extents must be positive");
    }
    if (cfg.cells_x < 4 || (cfg.mesh_dim == 2 && cfg.cells_y < 4)) {
        whole("[mesh] needs at least 4 cells per axis");
    }
    if (cfg.source_shape == "file" && cfg.source_file.empty()) {
        whole("[source] shape=file needs file=");
    }
    if (cfg.target_fraction && cfg.amplitude) {
        whole("[source] target_fraction and amplitude are exclusive");
    }
    if (cfg.target_fraction &&
        !(*cfg.target_fraction > 0.0 && *cfg.target_fraction < 1.0)) {
        whole("[source] target_fraction must lie in (0, 1)");
    }
    if (cfg.starts < 1 || cfg.budget < 1) {
        whole("[solver] starts and budget must be positive");
    }
    if (!(cfg.tol_res > 0.0) || !(cfg.tol_step > 0.0) || !(cfg.armijo > 0.0)) {
        whole("[solver] tolerances must be positive");
    }
    if (cfg.constants_starts < 1 || cfg.sweep_directions < 1) {
        whole("[run] constants_starts and sweep_directions must be positive");
    }
    if (cfg.fiber_direction == "file" && cfg.fiber_file.empty()) {
        whole("[fiber] direction=file needs file=");
    }
    if (!(cfg.fiber_t_lo > 0.0 && cfg.fiber_t_hi > cfg.fiber_t_lo) ||
        cfg.fiber_points < 2) {
        whole("[fiber] needs 0 < t_lo < t_hi and points >= 2");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::pair<std::vector<double>, std::vector<double>>
load_phi_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open generator table '" + path + "'");
    std::vector<double> ts, phis;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream row(line);
        double t = 0.0, v = 0.0;
        if (!(row >> t >> v)) {
            throw ConfigError("generator table expects 't phi' rows", line_no);
        }
        ts.push_back(t);
        phis.push_back(v);
    }
    if (ts.size() < 4) {
        throw IoError("generator table '" + path + "' needs >= 4 rows");
    }
    return {std::move(ts), std::move(phis)};
}

PhiSpec make_phi(const RunConfig& cfg) {
    if (cfg.phi_family == "power") {
        return PhiSpec::power(cfg.phi_p, cfg.window);
    }
    if (cfg.phi_family == "double_power") {
        return PhiSpec::double_power(cfg.phi_p, cfg.phi_q, cfg.window);
    }
    auto [ts, phis] = load_phi_table(cfg.phi_table_file);
    return PhiSpec::tabulated(ts, phis, cfg.window);
}

} // namespace nehari
