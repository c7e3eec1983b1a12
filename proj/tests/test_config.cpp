#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nehari/commands.hpp"
#include "nehari/config.hpp"
#include "nehari/errors.hpp"

using namespace nehari;

namespace {

const char* kFullConfig = R"(# full example
[phi]
family = double_power
p = 2.0
q = 2.5
t_min = 1e-5
t_max = 1e5
points = 2048

[problem]
space_dim = 5
crit_exp = 3.0

[mesh]
dim = 2
extent_x = 2.0
extent_y = 1.0
cells_x = 16
cells_y = 8

[source]
shape = bump
center_x = 0.4
center_y = 0.6
width = 0.2
amplitude = 0.3

[solver]
starts = 3
budget = 700
tol_res = 1e-5
tol_step = 1e-9
armijo = 1e-4

[run]
seed = 99
output_dir = cfg_out
constants_starts = 2
sweep_directions = 10

[fiber]
direction = sample
t_lo = 0.01
t_hi = 10
points = 40
)";

std::string temp_dir(const std::string& leaf) {
    const auto d = std::filesystem::temp_directory_path() / leaf;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig small_run_config(const std::string& out_dir) {
    RunConfig cfg = parse_config(R"(
[phi]
family = power
p = 2.0
[mesh]
dim = 1
cells_x = 24
[source]
shape = bump
target_fraction = 0.5
[solver]
starts = 2
budget = 800
[run]
constants_starts = 2
sweep_directions = 8
[fiber]
points = 16
)");
    cfg.output_dir = out_dir;
    return cfg;
}

} // namespace

TEST_CASE("full config text parses into every field") {
    const RunConfig cfg = parse_config(kFullConfig);
    CHECK(cfg.phi_family == "double_power");
    CHECK(cfg.phi_p == doctest::Approx(2.0));
    CHECK(cfg.phi_q == doctest::Approx(2.5));
    CHECK(cfg.window.t_min == doctest::Approx(1e-5));
    CHECK(cfg.window.points == 2048);
    CHECK(cfg.space_dim == 5);
    REQUIRE(cfg.crit_exp.has_value());
    CHECK(*cfg.crit_exp == doctest::Approx(3.0));
    CHECK(cfg.mesh_dim == 2);
    CHECK(cfg.extent_x == doctest::Approx(2.0));
    CHECK(cfg.cells_y == 8);
    CHECK(cfg.source_shape == "bump");
    REQUIRE(cfg.amplitude.has_value());
    CHECK(*cfg.amplitude == doctest::Approx(0.3));
    CHECK_FALSE(cfg.target_fraction.has_value());
    CHECK(cfg.starts == 3);
    CHECK(cfg.budget == 700);
    CHECK(cfg.seed == 99);
    CHECK(cfg.output_dir == "cfg_out");
    CHECK(cfg.fiber_direction == "sample");
    CHECK(cfg.fiber_points == 40);
}

TEST_CASE("defaults survive an empty config") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.phi_family == "power");
    CHECK(cfg.phi_p == doctest::Approx(2.0));
    CHECK(cfg.space_dim == 4);
    CHECK(cfg.mesh_dim == 1);
    CHECK(cfg.cells_x == 128);
    CHECK(cfg.seed == 42);
}

TEST_CASE("parse errors carry the offending line") {
    try {
        (void)parse_config("[phi]\nfamily = power\nbogus = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }

    CHECK_THROWS_AS((void)parse_config("x = 1\n"), ConfigError); // no section
    CHECK_THROWS_AS((void)parse_config("[nope]\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[phi]\np = abc\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[mesh]\ncells_x = 2.5\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config("[run]\nseed = -3\n"), ConfigError);
}

TEST_CASE("cross-field validation") {
    CHECK_THROWS_AS((void)parse_config("[phi]\np = 0.9\n"), ConfigError);
    CHECK_THROWS_AS(
        (void)parse_config("[phi]\nfamily = double_power\np = 3\nq = 2\n"),
        ConfigError);
    CHECK_THROWS_AS((void)parse_config("[phi]\nfamily = tabulated\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config("[mesh]\ncells_x = 2\n"), ConfigError);
    CHECK_THROWS_AS(
        (void)parse_config(
            "[source]\ntarget_fraction = 0.5\namplitude = 1\n"),
        ConfigError);
    CHECK_THROWS_AS((void)parse_config("[source]\ntarget_fraction = 1.5\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config("[problem]\nspace_dim = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config("[fiber]\nt_lo = 5\nt_hi = 1\n"),
                    ConfigError);
}

TEST_CASE("generator construction follows the family key") {
    RunConfig cfg;
    cfg.phi_family = "power";
    cfg.phi_p = 2.5;
    CHECK(make_phi(cfg).family() == PhiFamily::Power);

    cfg.phi_family = "double_power";
    cfg.phi_q = 3.0;
    CHECK(make_phi(cfg).family() == PhiFamily::DoublePower);

    const auto table =
        std::filesystem::temp_directory_path() / "nehari_cfg_table.txt";
    {
        std::ofstream out(table);
        out << "# t phi\n";
        for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            out << t << ' ' << t * t << '\n';
        }
    }
    cfg.phi_family = "tabulated";
    cfg.phi_table_file = table.string();
    CHECK(make_phi(cfg).family() == PhiFamily::Tabulated);
    std::filesystem::remove(table);

    cfg.phi_table_file = "/nonexistent/table.txt";
    CHECK_THROWS_AS((void)make_phi(cfg), IoError);
}

TEST_CASE("generator tables reject short or malformed input") {
    const auto path =
        std::filesystem::temp_directory_path() / "nehari_bad_table.txt";
    {
        std::ofstream out(path);
        out << "1 1\n2 4\n";
    }
    CHECK_THROWS_AS((void)load_phi_table(path.string()), IoError);
    {
        std::ofstream out(path);
        out << "1 1\n2 oops\n3 9\n4 16\n";
    }
    CHECK_THROWS_AS((void)load_phi_table(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("missing config files raise an io error") {
    CHECK_THROWS_AS((void)load_config("/nonexistent/nehari.cfg"), IoError);
}

TEST_CASE("check command writes provenance-led records") {
    const std::string dir = temp_dir("nehari_cmd_check");
    RunConfig cfg = small_run_config(dir);
    std::ostringstream out;
    CHECK(run_command("check", cfg, out, false) == 0);
    CHECK(out.str().find("[ ok ]") != std::string::npos);

    std::istringstream lines(slurp(dir + "/check.jsonl"));
    std::string first;
    REQUIRE(std::getline(lines, first));
    const auto prov = nlohmann::json::parse(first);
    CHECK(prov.at("record") == "provenance");
    CHECK(prov.at("artifact") == kArtifactName);
    CHECK(prov.at("command") == "check");
    CHECK(prov.at("seed") == 42);
    std::string second;
    REQUIRE(std::getline(lines, second));
    const auto rec = nlohmann::json::parse(second);
    CHECK(rec.at("record") == "hypotheses");
    CHECK(rec.at("all_ok") == true);
    std::filesystem::remove_all(dir);
}

TEST_CASE("check reports hypothesis failure with exit 1") {
    const std::string dir = temp_dir("nehari_cmd_check_bad");
    RunConfig cfg = small_run_config(dir);
    cfg.phi_family = "double_power";
    cfg.phi_p = 2.0;
    cfg.phi_q = 3.0;
    cfg.space_dim = 5; // chain value 0.5 <= 1: hypothesis (H) fails
    std::ostringstream out;
    CHECK(run_command("check", cfg, out, false) == 1);
    CHECK(out.str().find("[FAIL]") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("fiber command emits a scan table and a profile record") {
    const std::string dir = temp_dir("nehari_cmd_fiber");
    RunConfig cfg = small_run_config(dir);
    std::ostringstream out;
    CHECK(run_command("fiber", cfg, out, false) == 0);
    const std::string csv = slurp(dir + "/fiber_scan.csv");
    CHECK(csv.find("t,gamma,gamma_prime,m_u") != std::string::npos);
    // header + 16 data rows
    int rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 17);

    std::istringstream lines(slurp(dir + "/fiber.jsonl"));
    std::string line;
    REQUIRE(std::getline(lines, line));
    REQUIRE(std::getline(lines, line));
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec.at("record") == "fiber-profile");
    CHECK(rec.at("roots").size() == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("unknown subcommands exit with the usage code") {
    RunConfig cfg;
    std::ostringstream out;
    CHECK(run_command("frobnicate", cfg, out, true) == 2);
}

TEST_CASE("command-level errors map to exit 1") {
    const std::string dir = temp_dir("nehari_cmd_err");
    RunConfig cfg = small_run_config(dir);
    cfg.source_shape = "file";
    cfg.source_file = "/nonexistent/source.field";
    std::ostringstream out;
    CHECK(run_command("fiber", cfg, out, true) == 1);
    CHECK(out.str().find("error") != std::string::npos);
    std::filesystem::remove_all(dir);
}
