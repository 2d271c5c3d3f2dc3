#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "config.hpp"
#include "csv.hpp"
#include "doctest.h"
#include "experiments.hpp"
#include "gafzeros/errors.hpp"

using namespace gafz;
using namespace gafz::cli;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gafz_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config_error_path(const std::string& json, const std::string& experiment) {
    try {
        parse_config(json, experiment);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<accepted>";
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GAFZ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& json) {
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << json;
    return p;
}

}  // namespace

TEST_CASE("config validation reports field paths") {
    CHECK(config_error_path(R"({"radii": [0.5]})", "kappa") == "/seed");
    CHECK(config_error_path(R"({"seed": 1, "radii": [0.5, 1.5]})", "kappa") == "/radii/1");
    CHECK(config_error_path(R"({"seed": -4, "radii": 0.5})", "kappa") == "/seed");
    CHECK(config_error_path(R"({"seed": 1, "radii": 0.5, "colour": 3})", "kappa") == "/colour");
    CHECK(config_error_path(R"({"seed": 1, "experiment": "kappa", "radii": 0.5})", "mc-tail") == "/experiment");
    CHECK(config_error_path(R"({"seed": 1, "process": "hyperbolic-one", "radii": [2.0], "m": 1, "trials": 5})",
                            "mc-tail") == "/radii/0");
    CHECK(config_error_path(R"({"seed": 1, "process": "planar", "radii": [1], "m": {"from": 5, "to": 2}, "trials": 5})",
                            "mc-tail") == "/m/to");
    CHECK(config_error_path(
              R"({"seed": 1, "basis": "r2alogr", "data": {"source": "exact-tail", "ensemble": "ginibre", "radii": 1, "m": [5, 6, 7]}})",
              "exponent-fit") == "/basis");
    CHECK(config_error_path(
              R"({"seed": 1, "kind": "ModerateGrouped", "alpha": 1.5, "gamma": 1, "radii": [20, 1.2]})",
              "event-bound") == "/radii/1");
    CHECK(config_error_path("{not json", "kappa") == "/");
    CHECK(config_error_path(R"({"seed": 1, "radii": 0.5})", "kappa") == "<accepted>");
}

TEST_CASE("seed override and config hash") {
    const RunConfig a = parse_config(R"({"seed": 1, "threads": 2, "radii": 0.5})", "kappa");
    const RunConfig b = parse_config(R"({"threads": 7, "radii": 0.5})", "kappa", 99);
    CHECK(a.seed == 1);
    CHECK(b.seed == 99);
    CHECK(b.threads == 7);
    // Seed and thread count do not enter the hash; parameters do.
    CHECK(a.hash == b.hash);
    CHECK(a.hash.size() == 16);
    CHECK(parse_config(R"({"seed": 1, "radii": 0.6})", "kappa").hash != a.hash);
    CHECK(config_hash("") == "cbf29ce484222325");
}

TEST_CASE("CSV: header-only, formatting, round trip") {
    CHECK(to_csv({"a", "b"}, {}) == "a,b\n");
    CHECK_THROWS_AS(to_csv({"a", "b"}, {Row{1.0}}), std::invalid_argument);
    const double third = 1.0 / 3.0;
    const double tiny_log = -123456.78901234567;
    const std::string text = to_csv({"x", "log_p", "label", "flag", "n"},
                                    {Row{third, tiny_log, std::string("a,\"b\""), true, std::uint64_t{18446744073709551615ULL}},
                                     Row{Cell{}, -std::numeric_limits<double>::infinity(), std::string("plain"), false,
                                         std::int64_t{-3}}});
    CHECK(text.find('\r') == std::string::npos);
    const auto rows = parse_csv(text);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][0]) == third);
    CHECK(std::stod(rows[1][1]) == tiny_log);
    CHECK(rows[1][2] == "a,\"b\"");
    CHECK(rows[1][3] == "true");
    CHECK(rows[1][4] == "18446744073709551615");
    CHECK(rows[2][0].empty());
    CHECK(rows[2][1] == "-inf");
    CHECK(format_cell(0.1) == "0.10000000000000001");
}

TEST_CASE("exact-tail rows carry hash and seed and stay in log space") {
    const fs::path dir = scratch("exact");
    const RunConfig cfg =
        parse_config(R"({"seed": 5, "ensemble": "ginibre", "radii": 1.0, "m": {"from": 2, "to": 40}})", "exact-tail");
    const auto files = run_experiment(cfg, dir.string());
    REQUIRE(files.size() == 1);
    const auto rows = parse_csv(slurp(files[0]));
    REQUIRE(rows.size() == 40);
    CHECK(rows[0][0] == "config_hash");
    CHECK(rows[0][1] == "seed");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][0] == cfg.hash);
        CHECK(rows[i][1] == "5");
        CHECK(rows[i].back() == "true");
    }
    // m = 40 has log P far below the double range when exponentiated.
    CHECK(std::stod(rows.back()[5]) < -800.0);
}

TEST_CASE("CLI exit codes") {
    const fs::path dir = scratch("exit");
    const fs::path good = write_config(dir, "good.json", R"({"seed": 1, "radii": [0.3, 0.7]})");
    const fs::path bad = write_config(dir, "bad.json", R"({"seed": 1, "radii": [1.3]})");
    const fs::path numeric = write_config(
        dir, "numeric.json", R"({"seed": 1, "kind": "PlanarDomination", "radii": [49], "m": [1]})");
    CHECK(run_cli("kappa --config " + good.string() + " --out " + (dir / "o").string()) == 0);
    CHECK(fs::exists(dir / "o" / "kappa.csv"));
    CHECK(run_cli("kappa --config " + bad.string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_cli("kappa --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("kappa") == 2);
    CHECK(run_cli("event-bound --config " + numeric.string() + " --out " + (dir / "o").string()) == 3);
}

TEST_CASE("reruns are byte-identical across thread counts") {
    const fs::path dir = scratch("determinism");
    const fs::path cfg = write_config(
        dir, "mc.json", R"({"seed": 3, "process": "planar", "radii": [1.0, 1.5], "m": [2, 3], "trials": 400})");
    REQUIRE(run_cli("mc-tail --config " + cfg.string() + " --threads 1 --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("mc-tail --config " + cfg.string() + " --threads 3 --out " + (dir / "b").string()) == 0);
    REQUIRE(run_cli("mc-tail --config " + cfg.string() + " --threads 3 --out " + (dir / "c").string()) == 0);
    const std::string a = slurp(dir / "a" / "mc_tail.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b" / "mc_tail.csv"));
    CHECK(a == slurp(dir / "c" / "mc_tail.csv"));
    REQUIRE(run_cli("mc-tail --config " + cfg.string() + " --seed 4 --out " + (dir / "d").string()) == 0);
    CHECK(a != slurp(dir / "d" / "mc_tail.csv"));

    const fs::path sc = write_config(dir, "scatter.json", R"({"seed": 8, "r": 2.0, "m": 16, "samples": 3})");
    REQUIRE(run_cli("scatter --config " + sc.string() + " --threads 1 --out " + (dir / "s1").string()) == 0);
    REQUIRE(run_cli("scatter --config " + sc.string() + " --threads 2 --out " + (dir / "s2").string()) == 0);
    for (const char* f : {"scatter_conditioned.csv", "scatter_unconditioned.csv", "scatter_summary.csv"}) {
        CHECK(slurp(dir / "s1" / f) == slurp(dir / "s2" / f));
    }
    const auto summary = parse_csv(slurp(dir / "s1" / "scatter_summary.csv"));
    REQUIRE(summary.size() == 4);
    for (std::size_t i = 1; i < summary.size(); ++i) {
        CHECK(summary[i][3] == "true");
        CHECK(summary[i][4] == "16");
    }
}
