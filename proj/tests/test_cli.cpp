#include <doctest.h>

#include <sstream>
#include <string>

#include <json.hpp>

#include "bolab/cli.hpp"
#include "bolab/errors.hpp"
#include "support.hpp"

using namespace bolab;
namespace fs = std::filesystem;

namespace {

const std::string kSmall = R"({
  "schema_version": 1,
  "model": {"M": 20.0, "m": 1.0, "potential": {"family": "harmonic_coupling", "k1": 1.0, "k2": 1.0}},
  "grid1": {"half_width_in_nuclear_widths": 8.0, "n": 20},
  "grid2": {"x_min": -8.0, "x_max": 8.0, "n": 40},
  "n_surfaces": 2,
  "projector_rank": 2,
  "nuclear_levels": 2,
  "exact_levels": 2,
  "sweep": {"mass_ratios": [10, 100]}
})";

std::string cli() { return BOLAB_CLI_PATH; }

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("in-process commands write their files") {
    testing::TempDir dir("cli");
    RunConfig c = parse_run_config(kSmall);
    c.output_dir = dir.path();
    std::ostringstream log;

    REQUIRE(run("pes", c, log) == kExitOk);
    const std::string pes = testing::read_file(dir.path() / "pes.csv");
    CHECK(first_line(pes) == "x1,lambda_0,lambda_1");
    CHECK(line_count(pes) == 21);

    REQUIRE(run("bo", c, log) == kExitOk);
    CHECK(first_line(testing::read_file(dir.path() / "theta.csv")) == "x1,theta_0_0,theta_0_1,theta_1_0,theta_1_1");
    const auto bo = nlohmann::json::parse(testing::read_file(dir.path() / "bo_energies.json"));
    CHECK(bo.at("levels").size() == 4);
    CHECK(bo.at("schema_version") == 1);

    REQUIRE(run("exact", c, log) == kExitOk);
    const auto exact = nlohmann::json::parse(testing::read_file(dir.path() / "exact_energies.json"));
    CHECK(exact.at("k") == 2);
    CHECK(exact.at("energies").size() == 2);

    REQUIRE(run("project", c, log) == kExitOk);
    const auto heff = nlohmann::json::parse(testing::read_file(dir.path() / "heff_energies.json"));
    CHECK(heff.at("N") == 2);
    CHECK(heff.at("drift").size() == 2);

    REQUIRE(run("compare", c, log) == kExitOk);
    const auto report = nlohmann::json::parse(testing::read_file(dir.path() / "report.json"));
    CHECK(report.at("rows").size() == 1);

    REQUIRE(run("scaling", c, log) == kExitOk);
    const std::string scaling = testing::read_file(dir.path() / "scaling.csv");
    CHECK(first_line(scaling) == "ratio,kappa,bo_energy,exact_energy,relative_error,heavy_ratio,min_uncertainty_product");
    CHECK(line_count(scaling) == 3);

    CHECK(log.str().find("wrote ") != std::string::npos);
    CHECK(run("nonsense", c, log) == kExitUsage);
}

TEST_CASE("scaling without a sweep is a config error") {
    testing::TempDir dir("cli");
    RunConfig c = parse_run_config(kSmall);
    c.mass_ratios.clear();
    c.output_dir = dir.path();
    std::ostringstream log;
    CHECK(run("scaling", c, log) == kExitConfig);
}

TEST_CASE("overrides") {
    RunConfig c = parse_run_config(kSmall);
    RunOverrides o;
    o.out = "x/y";
    o.threads = 3;
    o.seed = 17;
    apply_overrides(c, o);
    CHECK(c.output_dir == fs::path("x/y"));
    CHECK(c.pipeline.threads == 3);
    CHECK(c.pipeline.exact.krylov.seed == 17);
    o.threads = 0;
    CHECK_THROWS_AS(apply_overrides(c, o), ConfigError);
}

TEST_CASE("binary exit codes") {
    testing::TempDir dir("clibin");
    const fs::path cfg = dir.path() / "small.json";
    testing::write_file(cfg, kSmall);
    const std::string quiet = " > " + (dir.path() / "log.txt").string() + " 2>&1";
    const std::string base = cli() + " --out " + (dir.path() / "out").string();

    CHECK(testing::shell(base + " pes --config " + cfg.string() + quiet) == 0);
    CHECK(fs::exists(dir.path() / "out" / "pes.csv"));

    CHECK(testing::shell(base + " bogus --config " + cfg.string() + quiet) == 1);
    CHECK(testing::read_file(dir.path() / "log.txt").find("usage:") != std::string::npos);
    CHECK(testing::shell(cli() + quiet) == 1);
    CHECK(testing::shell(base + " pes --config " + cfg.string() + " --threads many" + quiet) == 1);

    CHECK(testing::shell(base + " pes --config " + (dir.path() / "missing.json").string() + quiet) == 2);
    const fs::path broken = dir.path() / "broken.json";
    testing::write_file(broken, "{\"schema_version\": 1,");
    CHECK(testing::shell(base + " pes --config " + broken.string() + quiet) == 2);
    CHECK(testing::read_file(dir.path() / "log.txt").find("line") != std::string::npos);

    const fs::path stubborn = dir.path() / "stubborn.json";
    std::string text = kSmall;
    text.insert(text.rfind('}'), R"(, "solver": {"dense_below": 1, "max_restarts": 1, "rel_tol": 1e-15, "abs_tol": 1e-300})");
    testing::write_file(stubborn, text);
    CHECK(testing::shell(base + " exact --config " + stubborn.string() + quiet) == 3);
    CHECK(testing::read_file(dir.path() / "log.txt").find("residuals:") != std::string::npos);
}

TEST_CASE("environment variables stand in for flags") {
    testing::TempDir dir("clienv");
    const fs::path cfg = dir.path() / "small.json";
    testing::write_file(cfg, kSmall);
    const fs::path out = dir.path() / "env_out";
    const std::string cmd = "BO_LAB_CONFIG=" + cfg.string() + " BO_LAB_OUT=" + out.string() +
                            " BO_LAB_THREADS=2 " + cli() + " pes > /dev/null 2>&1";
    CHECK(testing::shell(cmd) == 0);
    CHECK(fs::exists(out / "pes.csv"));
}

TEST_CASE("separable config through the binary") {
    testing::TempDir dir("clisep");
    const std::string cmd = cli() + " compare --config " + std::string(BOLAB_CONFIG_DIR) + "/separable.json --out " +
                            dir.path().string() + " > /dev/null 2>&1";
    REQUIRE(testing::shell(cmd) == 0);
    const auto report = nlohmann::json::parse(testing::read_file(dir.path() / "report.json"));
    CHECK(report.at("rows").at(0).at("relative_error").get<double>() <= 1e-8);
}
