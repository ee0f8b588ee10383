#include "cli.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ham/aggregate.hpp"
#include "ham/compare.hpp"
#include "ham/config.hpp"
#include "ham/empirical.hpp"
#include "ham/errors.hpp"
#include "ham/report_io.hpp"

namespace ham::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutEnv = "HAMBREAK_OUT";

struct SimulateOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> perm_seed;
    std::vector<std::string> setups;
    std::string grid;
    std::optional<double> beta;
    std::optional<double> intensity;
    std::optional<int> threads;
    std::optional<int> runs;
    std::optional<int> n_perm;
    std::string out;
    bool pooled = false;
    bool fundamentalist = false;
    bool stochastic = false;
    bool memory = false;
    bool no_samples = false;
};

struct AnalyzeOptions {
    std::string data;
    std::string events;
    std::string config;
    std::optional<int> window;
    std::string out;
};

struct CompareOptions {
    std::string sim;
    std::string reference;
    std::string out;
};

fs::path resolve_out(const std::string& flag, const std::string& from_config) {
    if (!flag.empty()) return flag;
    if (!from_config.empty()) return from_config;
    if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
    return "hambreak_out";
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(path + " is not valid JSON: " + e.what());
    }
}

std::string cell_file(std::size_t index) {
    std::ostringstream ss;
    ss << "samples/cell_" << std::setw(4) << std::setfill('0') << index << ".csv";
    return ss.str();
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_experiment_config(o.config);
    if (o.config.empty()) cfg.setups = {"none"};
    if (o.seed) cfg.run.seed = *o.seed;
    if (o.perm_seed) cfg.perm_seed = *o.perm_seed;
    if (o.threads) cfg.run.threads = *o.threads;
    if (o.runs) cfg.run.n_runs = *o.runs;
    if (o.n_perm) cfg.n_perm = *o.n_perm;
    cfg.pooled_tests = cfg.pooled_tests || o.pooled;
    cfg.run.extensions.fundamentalist_default = cfg.run.extensions.fundamentalist_default || o.fundamentalist;
    cfg.run.extensions.stochastic_params = cfg.run.extensions.stochastic_params || o.stochastic;
    cfg.run.extensions.memory = cfg.run.extensions.memory || o.memory;
    if (!o.setups.empty()) cfg.setups = o.setups;
    if (o.grid == "paper13") {
        if (!o.setups.empty()) throw InvalidConfig("--grid paper13 already fixes the setups; drop --setup");
        cfg.setups = paper13_setup_names();
        cfg.grid = GridMode::single;
    } else if (o.grid == "full") {
        cfg.grid = GridMode::full;
    } else if (o.grid == "single") {
        cfg.grid = GridMode::single;
    }
    if (o.beta) {
        cfg.run.market.beta = *o.beta;
        cfg.betas = {*o.beta};
    }
    if (o.intensity) {
        cfg.level = *o.intensity;
        cfg.levels = {*o.intensity};
    }
    cfg.validate();

    const fs::path dir = resolve_out(o.out, cfg.out_dir);
    fs::create_directories(dir);

    std::vector<io::CellReport> reports;
    json cells_manifest = json::array();
    const stats::AggregateOptions base_opts{cfg.n_perm, cfg.perm_seed, cfg.run.threads, cfg.pooled_tests};
    for (const auto& name : cfg.setups) {
        RunConfig base = cfg.run;
        base.breaks = parse_setup(name, cfg.level).breaks;
        std::vector<SweepCell> cells;
        if (cfg.grid == GridMode::full) {
            cells = sweep_cells(base, cfg.betas, cfg.levels);
        } else {
            const bool has_intensity =
                base.has_break(BreakKind::overconfidence) || base.has_break(BreakKind::sentiment);
            const bool stochastic = base.extensions.stochastic_params;
            cells.push_back(SweepCell{base, stochastic ? 0.0 : base.market.beta,
                                      has_intensity && !stochastic ? cfg.level : 0.0, stochastic});
        }
        for (const auto& cell : cells) {
            const std::size_t index = reports.size();
            stats::AggregateOptions opts = base_opts;
            if (cfg.grid == GridMode::full) opts.perm_seed = derive_seed(cfg.perm_seed, index);
            const RunSamples samples = run_batch(cell.cfg);
            io::CellReport rep{name, cell.beta, cell.level, cell.stochastic, cell.cfg.seed,
                               stats::aggregate(samples, opts, name)};
            json entry = {{"index", index},       {"setup", name},          {"beta", cell.beta},
                          {"level", cell.level},  {"stochastic", cell.stochastic},
                          {"seed", cell.cfg.seed}, {"perm_seed", opts.perm_seed}};
            if (!o.no_samples) {
                std::ostringstream csv;
                io::write_samples_csv(csv, samples, cell.cfg);
                write_text(dir / cell_file(index), csv.str());
                entry["samples"] = cell_file(index);
            }
            cells_manifest.push_back(std::move(entry));
            if (!rep.report.flagged_runs.empty()) {
                err << name << ": " << rep.report.flagged_runs.size()
                    << " runs had a statistic that was not applicable (see report.json)\n";
            }
            reports.push_back(std::move(rep));
        }
    }

    std::ostringstream csv;
    io::write_stat_reports_csv(csv, reports);
    write_text(dir / "report.csv", csv.str());
    write_text(dir / "report.json", io::stat_reports_json(reports).dump(2) + "\n");
    const json manifest = {{"tool", "hambreak"},
                           {"version", HAMBREAK_VERSION},
                           {"created_utc", utc_timestamp()},
                           {"master_seed", cfg.run.seed},
                           {"perm_seed", cfg.perm_seed},
                           {"config", io::config_json(cfg)},
                           {"cells", cells_manifest}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    out << csv.str();
    out << "wrote " << reports.size() << " report rows to " << dir.string() << "\n";
    return kOk;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<empirical::EventSpec> events;
    std::string out_from_config;
    if (!o.config.empty()) {
        const ExperimentConfig cfg = load_experiment_config(o.config);
        events = cfg.events;
        out_from_config = cfg.out_dir;
    }
    if (!o.events.empty()) events = empirical::load_events(o.events);
    if (events.empty()) throw InvalidConfig("no events given (use --events or a config with \"events\")");
    if (o.window) {
        if (*o.window < 1) throw InvalidConfig("--window must be >= 1");
        for (auto& e : events) e.window_days = *o.window;
    }
    const empirical::PriceData data = empirical::load_prices(o.data);
    const empirical::EmpiricalReport report = empirical::empirical_report(events, data);
    for (const auto& line : data.log) err << line << "\n";
    for (const auto& line : report.log) err << line << "\n";

    const fs::path dir = resolve_out(o.out, out_from_config);
    std::ostringstream csv;
    io::write_empirical_csv(csv, report);
    write_text(dir / "empirical.csv", csv.str());
    write_text(dir / "empirical.json", io::empirical_json(report).dump(2) + "\n");
    out << csv.str();
    return kOk;
}

int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream&) {
    const auto sims = compare::simulated_patterns(read_json(o.sim));
    const auto reference = compare::reference_pattern(read_json(o.reference));
    const auto rows = compare::rank(sims, reference);

    std::ostringstream csv;
    csv << "rank,setup,direction_match,significant_match,direction_distance,magnitude_distance\n";
    json doc = json::array();
    for (const auto& r : rows) {
        csv << r.rank << ',' << r.label << ',' << (r.direction_match ? "yes" : "no") << ','
            << (r.significant_match ? "yes" : "no") << ',' << io::format_number(r.direction_distance) << ','
            << io::format_number(r.magnitude_distance) << '\n';
        doc.push_back({{"rank", r.rank},
                       {"setup", r.label},
                       {"direction_match", r.direction_match},
                       {"significant_match", r.significant_match},
                       {"direction_distance", r.direction_distance},
                       {"magnitude_distance", r.magnitude_distance}});
    }
    if (!o.out.empty()) {
        write_text(fs::path(o.out) / "compare.csv", csv.str());
        write_text(fs::path(o.out) / "compare.json",
                   json{{"kind", "compare"}, {"reference", reference.label}, {"rows", doc}}.dump(2) + "\n");
    }
    out << csv.str();
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heterogeneous agent model with behavioral breaks: simulation and empirical comparison",
                 "hambreak"};
    app.set_version_flag("--version", std::string(HAMBREAK_VERSION));
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Run Monte Carlo batches and aggregate them per setup");
    s->add_option("--config", sim.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    s->add_option("--seed", sim.seed, "Master seed of the simulations");
    s->add_option("--perm-seed", sim.perm_seed, "Seed of the permutation tests");
    s->add_option("--setup", sim.setups,
                  "Setup name, repeatable: none, herding, overconfidence[+bias|+trend], "
                  "sentiment(+|-)[bias|trend|mix]; join elements with ',' to combine");
    s->add_option("--grid", sim.grid, "paper13 (the 13 single-element setups), full (beta x level sweep) or single")
        ->check(CLI::IsMember({"paper13", "full", "single"}));
    s->add_option("--beta", sim.beta, "Intensity of choice (restricts the sweep to this value)")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--intensity", sim.intensity,
                  "Break intensity level in (0, 1], a fraction of each element's maximum");
    s->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
    s->add_option("--runs", sim.runs, "Runs per cell")->check(CLI::PositiveNumber);
    s->add_option("--n-perm", sim.n_perm, "Permutations per distribution test");
    s->add_option("--out", sim.out, std::string("Output directory (default: config, then $") + kOutEnv +
                                        ", then ./hambreak_out)");
    s->add_flag("--pooled-tests", sim.pooled, "Also test the pooled B/b/a/A samples");
    s->add_flag("--fundamentalist", sim.fundamentalist, "Pin strategy 0 to g = b = 0");
    s->add_flag("--stochastic", sim.stochastic, "Draw beta and intensities per run");
    s->add_flag("--memory", sim.memory, "Draw per-strategy memory lengths");
    s->add_flag("--no-samples", sim.no_samples, "Skip the per-cell sample CSV files");

    AnalyzeOptions an;
    auto* a = app.add_subcommand("analyze", "Before/after statistics of price differences around events");
    a->add_option("--data", an.data, "Price CSV with columns date,ticker,close")->required();
    a->add_option("--events", an.events, "Event file (JSON)");
    a->add_option("--config", an.config, "Experiment config holding \"events\"")->check(CLI::ExistingFile);
    a->add_option("--window", an.window, "Trading days on each side (overrides the event files)");
    a->add_option("--out", an.out, std::string("Output directory (default: $") + kOutEnv + ", then ./hambreak_out)");

    CompareOptions cmp;
    auto* c = app.add_subcommand("compare", "Rank simulated setups against an empirical direction pattern");
    c->add_option("--sim", cmp.sim, "report.json written by simulate")->required();
    c->add_option("--reference", cmp.reference, "empirical.json written by analyze, or a one-row report.json")
        ->required();
    c->add_option("--out", cmp.out, "Directory for compare.csv and compare.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInvalidInput;
    }

    try {
        if (s->parsed()) return cmd_simulate(sim, out, err);
        if (a->parsed()) return cmd_analyze(an, out, err);
        return cmd_compare(cmp, out, err);
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        // InvalidConfig, InvalidSpec and the other input errors
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
}

}  // namespace ham::cli
