#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "ham/config.hpp"
#include "ham/errors.hpp"
#include "ham/report_io.hpp"

using namespace ham;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = HAM_FIXTURE_DIR;

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hambreak");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    std::random_device rd;
    const fs::path p = fs::temp_directory_path() / ("hambreak_test_" + name + "_" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("config_cli") {

TEST_CASE("setup names") {
    CHECK(parse_setup("none", 1.0).breaks.empty());
    const auto h = parse_setup("herding", 1.0);
    REQUIRE(h.breaks.size() == 1);
    CHECK(h.breaks[0].kind == BreakKind::herding);

    const auto o = parse_setup("overconfidence+trend", 1.0);
    CHECK(o.breaks[0].target == BreakTarget::trend_only);
    CHECK(o.breaks[0].intensity_g == doctest::Approx(0.5));

    const auto s = parse_setup("sentiment-mix", 0.5);
    CHECK(s.breaks[0].kind == BreakKind::sentiment);
    CHECK(s.breaks[0].sign == Sign::negative);
    CHECK(s.breaks[0].target == BreakTarget::mixed);
    CHECK(s.breaks[0].intensity_b == doctest::Approx(0.15));

    CHECK(parse_setup("sentiment+", 1.0).breaks[0].target == BreakTarget::both);
    CHECK(parse_setup("herding, sentiment+bias", 1.0).breaks.size() == 2);

    CHECK_THROWS_AS((void)parse_setup("sentiment", 1.0), InvalidConfig);
    CHECK_THROWS_AS((void)parse_setup("overconfidence+mix", 1.0), InvalidConfig);
    CHECK_THROWS_AS((void)parse_setup("herding,herding", 1.0), InvalidConfig);
    CHECK_THROWS_AS((void)parse_setup("panic", 1.0), InvalidConfig);
    CHECK_THROWS_AS((void)parse_setup("", 1.0), InvalidConfig);

    const auto names = paper13_setup_names();
    CHECK(names.size() == 13);
    for (const auto& n : names) CHECK_NOTHROW((void)parse_setup(n, 1.0));
}

TEST_CASE("experiment config") {
    const auto cfg = parse_experiment_config(
        R"({"seed": 5, "setups": ["herding"], "run": {"n_runs": 10}, "market": {"beta": 60}, "extensions": {"memory": true}})");
    CHECK(cfg.run.seed == 5);
    CHECK(cfg.run.n_runs == 10);
    CHECK(cfg.run.market.beta == 60.0);
    CHECK(cfg.run.extensions.memory);
    CHECK(cfg.setups == std::vector<std::string>{"herding"});

    CHECK_THROWS_AS((void)parse_experiment_config(R"({"sede": 5})"), InvalidConfig);
    CHECK_THROWS_AS((void)parse_experiment_config(R"({"market": {"betta": 5}})"), InvalidConfig);
    CHECK_THROWS_AS((void)parse_experiment_config(R"({"run": {"T": "long"}})"), InvalidConfig);
    CHECK_THROWS_AS((void)parse_experiment_config(R"({"level": 2})"), InvalidConfig);
    CHECK_THROWS_AS((void)parse_experiment_config(R"({"run": {"window": 500}})"), InvalidConfig);
    CHECK_THROWS_AS((void)parse_experiment_config("{"), InvalidConfig);
    try {
        (void)parse_experiment_config(R"({"market": {"betta": 5}})");
    } catch (const InvalidConfig& e) {
        CHECK(std::string(e.what()).find("market") != std::string::npos);
    }

    const auto paper = load_experiment_config(std::string(HAM_SOURCE_DIR) + "/configs/paper13.json");
    CHECK(paper.setups.size() == 13);

    const auto round = parse_experiment_config(io::config_json(paper).dump());
    CHECK(round.setups == paper.setups);
    CHECK(round.run.seed == paper.run.seed);
    CHECK(round.perm_seed == paper.perm_seed);
    CHECK(round.run.market.beta == paper.run.market.beta);
    CHECK(round.run.T == paper.run.T);
    CHECK(round.n_perm == paper.n_perm);
    CHECK(round.run.extensions == paper.run.extensions);
}

TEST_CASE("cli basics") {
    const auto help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    CHECK(run_cli({"--version"}).code == 0);
    CHECK(run_cli({"simulate", "--no-such-flag"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"simulate", "--setup", "panic", "--runs", "2"}).code == 2);
}

TEST_CASE("simulate is deterministic") {
    const auto d1 = scratch_dir("sim1");
    const auto d2 = scratch_dir("sim2");
    const std::vector<std::string> common{"simulate", "--setup", "sentiment+bias", "--setup", "herding",
                                          "--runs", "4", "--n-perm", "99", "--perm-seed", "4"};
    auto a1 = common;
    a1.insert(a1.end(), {"--seed", "3", "--out", d1.string()});
    auto a2 = common;
    a2.insert(a2.end(), {"--seed", "3", "--out", d2.string(), "--threads", "3"});
    const auto r1 = run_cli(a1);
    const auto r2 = run_cli(a2);
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    CHECK(slurp(d1 / "report.csv") == slurp(d2 / "report.csv"));
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "samples/cell_0000.csv") == slurp(d2 / "samples/cell_0000.csv"));
    CHECK(fs::exists(d1 / "manifest.json"));
    const auto manifest = nlohmann::json::parse(slurp(d1 / "manifest.json"));
    CHECK(manifest.at("master_seed") == 3);
    CHECK(manifest.at("cells").size() == 2);

    const auto again = scratch_dir("sim3");
    auto a3 = common;
    a3.insert(a3.end(), {"--out", again.string(), "--seed", "99"});
    REQUIRE(run_cli(a3).code == 0);
    CHECK(slurp(again / "report.csv") != slurp(d1 / "report.csv"));

    // a report compared with itself ranks first with a perfect match
    const auto cmp = scratch_dir("cmp");
    const auto single = scratch_dir("single");
    REQUIRE(run_cli({"simulate", "--setup", "sentiment+bias", "--runs", "4", "--n-perm", "99", "--seed", "3",
                     "--perm-seed", "4", "--out", single.string(), "--no-samples"})
                .code == 0);
    const auto c = run_cli({"compare", "--sim", (d1 / "report.json").string(), "--reference",
                            (single / "report.json").string(), "--out", cmp.string()});
    REQUIRE(c.code == 0);
    const auto doc = nlohmann::json::parse(slurp(cmp / "compare.json"));
    const auto& top = doc.at("rows").at(0);
    CHECK(top.at("rank") == 1);
    CHECK(top.at("setup").get<std::string>().rfind("sentiment+bias", 0) == 0);
    CHECK(top.at("direction_match") == true);
    CHECK(top.at("direction_distance").get<double>() == 0.0);
    CHECK(top.at("magnitude_distance").get<double>() == 0.0);

    for (const auto& d : {d1, d2, again, cmp, single}) fs::remove_all(d);
}

TEST_CASE("paper13 grid writes thirteen rows") {
    const auto d = scratch_dir("grid");
    const auto r = run_cli({"simulate", "--grid", "paper13", "--runs", "2", "--n-perm", "99", "--no-samples", "--out",
                            d.string()});
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(d / "report.csv"));
    std::string line;
    int rows = -1;  // header
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 13);
    CHECK(run_cli({"simulate", "--grid", "paper13", "--setup", "herding", "--out", d.string()}).code == 2);
    fs::remove_all(d);
}

TEST_CASE("analyze") {
    const auto d = scratch_dir("analyze");
    const auto ok = run_cli({"analyze", "--data", kFixtures + "/five_events_prices.csv", "--events",
                             kFixtures + "/five_events.json", "--out", d.string()});
    REQUIRE(ok.code == 0);
    CHECK(ok.err.find("ZZZ skipped, not in data") != std::string::npos);
    CHECK(fs::exists(d / "empirical.csv"));
    const auto doc = nlohmann::json::parse(slurp(d / "empirical.json"));
    CHECK(doc.at("kind") == "empirical_report");
    CHECK(doc.at("events").size() == 5);

    const auto bad = d / "bad.csv";
    {
        std::ofstream f(bad);
        f << "date,ticker,close\n2020-01-02,AAA,10\n2020-01-03,AAA\n";
    }
    const auto malformed = run_cli({"analyze", "--data", bad.string(), "--events", kFixtures + "/five_events.json",
                                    "--out", d.string()});
    CHECK(malformed.code == 2);
    CHECK(malformed.err.find("line 3") != std::string::npos);
    CHECK(run_cli({"analyze", "--data", kFixtures + "/five_events_prices.csv", "--out", d.string()}).code == 2);
    CHECK(run_cli({"compare", "--sim", (d / "nothing.json").string(), "--reference", (d / "empirical.json").string()})
              .code == 2);
    fs::remove_all(d);
}

}
