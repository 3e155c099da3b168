#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace uteich;
using namespace uteich::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunContext context(const std::string& tag, RunConfig c = {}) {
    RunContext ctx;
    ctx.config = c;
    ctx.outDir = (fs::temp_directory_path() / ("uteich_cli_" + tag)).string();
    fs::remove_all(ctx.outDir);
    ctx.quiet = true;
    return ctx;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        REQUIRE(!line.empty());
        REQUIRE(line.back() == '\r');
        line.pop_back();
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("config parsing") {
    auto c = RunConfig::parse("# comment\n[truncation]\nN = 32  # inline\nD=48\n\n[kdv]\nconvention = euler-arnold-3qqx\n");
    CHECK(c.N == 32);
    CHECK(c.D == 48);
    CHECK(c.K == 16);
    CHECK(c.convention == KdVConvention::eulerArnold3qqx);

    auto d = RunConfig::parse(c.to_text());
    CHECK(d.to_text() == c.to_text());

    CHECK_THROWS_AS(RunConfig::parse("[truncation]\nbogus = 1\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::parse("[nosuch]\nN = 1\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::parse("N = 1\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::parse("[truncation]\nN = 0\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::parse("[truncation]\nN = 3.5\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::parse("[tolerance]\nneumann = 1.5\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::parse("[kdv]\nconvention = other\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::parse("[truncation]\nM = 255\n"), ConfigInvalid);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/run.cfg"), ConfigInvalid);
}

TEST_CASE("validate: default config passes, D = 4 fails on degree overflow") {
    auto ok = validate_report(RunConfig{});
    for (const auto& ch : ok["checks"]) CHECK_MESSAGE(ch["pass"].get<bool>(), ch.dump());
    CHECK(ok["pass"].get<bool>());
    auto hs = ok["checks"][1];
    CHECK(hs["name"] == "graph_hs_decay");
    CHECK(hs["values"]["fitted_C"].get<double>() > 0);

    auto ctx = context("d4", RunConfig::parse("[truncation]\nD = 4\n"));
    std::ostringstream log;
    CHECK(run_command("validate", ctx, log) == 1);
    auto rep = nlohmann::json::parse(slurp(fs::path(ctx.outDir) / "validate.json"));
    bool sawOverflow = false;
    for (const auto& ch : rep["checks"])
        if (ch.contains("error") && ch["error"] == "DegreeOverflow") sawOverflow = !ch["pass"].get<bool>();
    CHECK(sawOverflow);
}

TEST_CASE("weld with mu = 0 gives the identity") {
    auto ctx = context("weld0");
    std::ostringstream log;
    REQUIRE(run_command("weld", ctx, log) == 0);
    auto rows = csv_rows(slurp(fs::path(ctx.outDir) / "weld.csv"));
    REQUIRE(rows.size() == 257);
    CHECK(rows[0] == std::vector<std::string>{"theta", "f0_re", "f0_im", "finf_re", "finf_im", "sigma"});
    for (size_t r = 1; r < rows.size(); ++r) CHECK(std::abs(std::stod(rows[r][5]) - std::stod(rows[r][0])) < 1e-12);
}

TEST_CASE("curvature sweep, seed in the output, byte-identical reruns") {
    auto ctx = context("curv");
    std::ostringstream log;
    REQUIRE(run_command("curvature", ctx, log) == 0);
    std::string first = slurp(fs::path(ctx.outDir) / "curvature.csv");
    auto rows = csv_rows(first);
    REQUIRE(rows.size() == 51);
    for (size_t r = 1; r < rows.size(); ++r) {
        CHECK(rows[r][0] == "7");
        CHECK(std::stod(rows[r][2]) < -1.5);
    }
    auto rep = nlohmann::json::parse(slurp(fs::path(ctx.outDir) / "curvature.json"));
    CHECK(rep["seed"] == 7);
    CHECK(rep["generator"] == "mt19937_64");
    CHECK(rep["max_K"].get<double>() < -1.5);

    REQUIRE(run_command("curvature", ctx, log) == 0);
    CHECK(slurp(fs::path(ctx.outDir) / "curvature.csv") == first);

    auto other = ctx;
    other.config.seed = 8;
    REQUIRE(run_command("curvature", other, log) == 0);
    CHECK(slurp(fs::path(ctx.outDir) / "curvature.csv") != first);
}

TEST_CASE("geodesic and spectral KdV exports") {
    auto ctx = context("exports", RunConfig::parse("[kdv]\nt_end = 0.01\ndt = 1e-3\n[truncation]\nM = 64\n"));
    std::ostringstream log;
    REQUIRE(run_command("geodesic", ctx, log) == 0);
    auto g = csv_rows(slurp(fs::path(ctx.outDir) / "geodesic.csv"));
    CHECK(g.size() == 12);
    CHECK(g[0][0] == "t");

    REQUIRE(run_command("kdv-spectral", ctx, log) == 0);
    auto k = csv_rows(slurp(fs::path(ctx.outDir) / "kdv_spectral.csv"));
    CHECK(k[0] == std::vector<std::string>{"convention", "t", "x", "u"});
    CHECK(k[1][0] == "kdv-6uux");
    CHECK((k.size() - 1) % 64 == 0);
}

TEST_CASE("kdv-geodesic writes the convergence table") {
    auto ctx = context("kdvgeo", RunConfig::parse("[kdv]\nsamples = 2\nlevels = 2\nt_end = 0.01\n"));
    std::ostringstream log;
    REQUIRE(run_command("kdv-geodesic", ctx, log) == 0);
    auto t = csv_rows(slurp(fs::path(ctx.outDir) / "kdv_convergence.csv"));
    REQUIRE(t.size() == 3);
    CHECK(t[0] == std::vector<std::string>{"h", "max_residual", "ratio"});
    CHECK(std::stod(t[2][2]) > 0);
}

TEST_CASE("unknown command") {
    std::ostringstream log;
    CHECK_THROWS_AS(run_command("plot", context("unknown"), log), ConfigInvalid);
    CHECK(command_names().size() == 7);
}
