#include "ham/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "ham/errors.hpp"

namespace ham::io {

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) throw InvalidConfig("expected a number or null");
    return v.get<double>();
}

json named_counts(const std::array<int, 4>& v, const std::array<const char*, 4>& names) {
    json out = json::object();
    for (std::size_t k = 0; k < 4; ++k) out[names[k]] = v[k];
    return out;
}

std::array<int, 4> counts_from(const json& obj, const std::array<const char*, 4>& names) {
    std::array<int, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) out[k] = obj.at(names[k]).get<int>();
    return out;
}

json test_json(const stats::TestResult& t) {
    return {{"statistic", number_or_null(t.statistic)}, {"p_value", number_or_null(t.p_value)}};
}

json optional_tests_json(const std::array<std::optional<stats::TestResult>, 4>& tests,
                         const std::array<const char*, 4>& names) {
    json out = json::object();
    for (std::size_t k = 0; k < 4; ++k) out[names[k]] = tests[k] ? test_json(*tests[k]) : json(nullptr);
    return out;
}

json moments_json(const stats::MomentSummary& m) {
    return {{"n", m.n},
            {"mean", m.mean},
            {"variance", m.variance},
            {"skewness", m.skewness},
            {"kurtosis", m.kurtosis},
            {"min", m.min},
            {"max", m.max}};
}

std::string marks(int dir, int stars) {
    if (dir == 0) return "";
    return std::string(dir > 0 ? "↑" : "↓") + std::string(static_cast<std::size_t>(stars), '*');
}

void segment_rows(std::ostream& out, int run_id, const char* segment, const std::vector<double>& xs,
                  int first_period) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << run_id << ',' << first_period + static_cast<int>(i) << ',' << segment << ','
            << format_number(xs[i]) << '\n';
    }
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_samples_csv(std::ostream& out, const RunSamples& samples, const RunConfig& cfg) {
    out << "run_id,period,segment,x\n";
    const int first_B = cfg.burn() + 1;
    for (const auto& run : samples.runs) {
        const RunParts& p = run.parts;
        segment_rows(out, run.run_id, "B", p.B, first_B);
        segment_rows(out, run.run_id, "b", p.b, cfg.bpd - static_cast<int>(p.b.size()));
        segment_rows(out, run.run_id, "a", p.a, cfg.bpd);
        segment_rows(out, run.run_id, "A", p.A, cfg.bpd);
    }
}

void write_stat_reports_csv(std::ostream& out, const std::vector<CellReport>& cells) {
    out << "setup,beta,level,mean_up,var_up,var_delta_pct,skew_up,kurt_down,kurt_delta_pct,"
           "cvm_B_b,cvm_b_a,cvm_a_A,cvm_A_B,jb_B,jb_b,jb_a,jb_A\n";
    for (const auto& c : cells) {
        out << c.setup << ',' << (c.stochastic ? std::string("stochastic") : format_number(c.beta)) << ','
            << (c.stochastic ? std::string("stochastic") : format_number(c.level));
        for (double v : c.report.row()) out << ',' << format_number(v);
        out << '\n';
    }
}

json stat_reports_json(const std::vector<CellReport>& cells) {
    json reports = json::array();
    for (const auto& c : cells) {
        const stats::StatReport& r = c.report;
        json j = {{"setup", c.setup},
                  {"beta", c.beta},
                  {"level", c.level},
                  {"stochastic", c.stochastic},
                  {"seed", c.seed},
                  {"n_runs", r.n_runs},
                  {"mean_up", r.mean_up},
                  {"var_up", r.var_up},
                  {"var_delta_pct", number_or_null(r.var_delta_pct)},
                  {"skew_up", r.skew_up},
                  {"kurt_down", r.kurt_down},
                  {"kurt_delta_pct", number_or_null(r.kurt_delta_pct)},
                  {"n_shape_runs", r.n_shape_runs},
                  {"cvm_nonreject", named_counts(r.cvm_nonreject, stats::kCvmPairs)},
                  {"cvm_applicable", named_counts(r.cvm_applicable, stats::kCvmPairs)},
                  {"jb_nonreject", named_counts(r.jb_nonreject, stats::kJbSamples)},
                  {"jb_applicable", named_counts(r.jb_applicable, stats::kJbSamples)},
                  {"flagged_runs", r.flagged_runs}};
        if (r.pooled) {
            j["pooled"] = {{"cvm", optional_tests_json(r.pooled->cvm, stats::kCvmPairs)},
                           {"jb", optional_tests_json(r.pooled->jb, stats::kJbSamples)}};
        }
        reports.push_back(std::move(j));
    }
    return {{"kind", "stat_reports"}, {"reports", std::move(reports)}};
}

std::vector<CellReport> stat_reports_from_json(const json& doc) {
    if (!doc.is_object() || doc.value("kind", "") != "stat_reports" || !doc.contains("reports") ||
        !doc["reports"].is_array())
        throw InvalidConfig("not a simulation report (expected kind \"stat_reports\")");
    std::vector<CellReport> out;
    try {
        for (const auto& j : doc["reports"]) {
            CellReport c;
            c.setup = j.at("setup").get<std::string>();
            c.beta = j.at("beta").get<double>();
            c.level = j.at("level").get<double>();
            c.stochastic = j.at("stochastic").get<bool>();
            c.seed = j.at("seed").get<std::uint64_t>();
            stats::StatReport& r = c.report;
            r.label = c.setup;
            r.n_runs = j.at("n_runs").get<int>();
            r.mean_up = j.at("mean_up").get<int>();
            r.var_up = j.at("var_up").get<int>();
            r.var_delta_pct = number_from(j.at("var_delta_pct"));
            r.skew_up = j.at("skew_up").get<int>();
            r.kurt_down = j.at("kurt_down").get<int>();
            r.kurt_delta_pct = number_from(j.at("kurt_delta_pct"));
            r.n_shape_runs = j.at("n_shape_runs").get<int>();
            r.cvm_nonreject = counts_from(j.at("cvm_nonreject"), stats::kCvmPairs);
            r.cvm_applicable = counts_from(j.at("cvm_applicable"), stats::kCvmPairs);
            r.jb_nonreject = counts_from(j.at("jb_nonreject"), stats::kJbSamples);
            r.jb_applicable = counts_from(j.at("jb_applicable"), stats::kJbSamples);
            r.flagged_runs = j.at("flagged_runs").get<std::vector<int>>();
            out.push_back(std::move(c));
        }
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("simulation report: ") + e.what());
    }
    return out;
}

void write_empirical_csv(std::ostream& out, const empirical::EmpiricalReport& report) {
    out << "event,sample,n,mean,mean_delta,variance,variance_delta,variance_delta_pct,skewness,skewness_delta,"
           "kurtosis,kurtosis_delta,kurtosis_delta_pct,min,max,jb_p\n";
    for (const auto& e : report.events) {
        const auto row = [&](const char* side, const stats::MomentSummary& m, const stats::TestResult& jb,
                             bool after) {
            out << e.name << ',' << side << ',' << m.n << ',' << format_number(m.mean) << ','
                << (after ? marks(e.mean_dir, e.mean_stars) : "") << ',' << format_number(m.variance) << ','
                << (after ? marks(e.var_dir, e.var_stars) : "") << ','
                << (after ? format_number(e.var_delta_pct) : "") << ',' << format_number(m.skewness) << ','
                << (after ? marks(e.skew_dir, 0) : "") << ',' << format_number(m.kurtosis) << ','
                << (after ? marks(e.kurt_dir, 0) : "") << ','
                << (after ? format_number(e.kurt_delta_pct) : "") << ',' << format_number(m.min) << ','
                << format_number(m.max) << ',' << format_number(jb.p_value) << '\n';
        };
        row("B", e.before, e.jb_before, false);
        row("A", e.after, e.jb_after, true);
    }
    const auto& s = report.summary;
    out << "Summary,,,," << s[0].label() << ",,," << s[1].label() << ",," << s[2].label() << ",,"
        << s[3].label() << ",,,,\n";
}

json empirical_json(const empirical::EmpiricalReport& report) {
    json events = json::array();
    for (const auto& e : report.events) {
        events.push_back({{"name", e.name},
                          {"bpd", empirical::format_date(e.bpd)},
                          {"included", e.included},
                          {"before", moments_json(e.before)},
                          {"after", moments_json(e.after)},
                          {"mean_test", test_json(e.mean_test)},
                          {"variance_test", test_json(e.variance_test)},
                          {"jb_before", test_json(e.jb_before)},
                          {"jb_after", test_json(e.jb_after)},
                          {"direction",
                           {{"mean", e.mean_dir}, {"variance", e.var_dir}, {"skewness", e.skew_dir},
                            {"kurtosis", e.kurt_dir}}},
                          {"stars", {{"mean", e.mean_stars}, {"variance", e.var_stars}}},
                          {"var_delta_pct", number_or_null(e.var_delta_pct)},
                          {"kurt_delta_pct", number_or_null(e.kurt_delta_pct)}});
    }
    json summary = json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& t = report.summary[k];
        summary[empirical::kTallyStats[k]] = {{"up", t.up},         {"down", t.down},
                                              {"n_events", t.n_events}, {"majority", t.majority},
                                              {"stars", t.stars},   {"label", t.label()}};
    }
    return {{"kind", "empirical_report"}, {"events", events}, {"summary", summary}, {"log", report.log}};
}

json config_json(const ExperimentConfig& cfg) {
    const RunConfig& r = cfg.run;
    json events = json::array();
    for (const auto& e : cfg.events) {
        json ex = json::array();
        for (const auto& x : e.exclusions) ex.push_back({{"ticker", x.ticker}, {"reason", x.reason}});
        events.push_back({{"name", e.name},
                          {"bpd", empirical::format_date(e.bpd)},
                          {"window_days", e.window_days},
                          {"tickers", e.tickers},
                          {"exclusions", ex},
                          {"description", e.description}});
    }
    return {{"seed", r.seed},
            {"perm_seed", cfg.perm_seed},
            {"n_perm", cfg.n_perm},
            {"threads", r.threads},
            {"out_dir", cfg.out_dir},
            {"pooled_tests", cfg.pooled_tests},
            {"setups", cfg.setups},
            {"level", cfg.level},
            {"grid", cfg.grid == GridMode::full ? "full" : "single"},
            {"betas", cfg.betas},
            {"levels", cfg.levels},
            {"run", {{"T", r.T}, {"bpd", r.bpd}, {"burn_frac", r.burn_frac}, {"window", r.window}, {"n_runs", r.n_runs}}},
            {"market",
             {{"R", r.market.R},
              {"beta", r.market.beta},
              {"risk_term", r.market.risk_term},
              {"H", r.market.H},
              {"noise_halfwidth", r.market.noise_halfwidth},
              {"ybar", r.market.ybar}}},
            {"generator", {{"g_mean", r.gen.g_mean}, {"g_sd", r.gen.g_sd}, {"b_mean", r.gen.b_mean}, {"b_sd", r.gen.b_sd}}},
            {"extensions",
             {{"fundamentalist_default", r.extensions.fundamentalist_default},
              {"stochastic_params", r.extensions.stochastic_params},
              {"memory", r.extensions.memory}}},
            {"events", events}};
}

}  // namespace ham::io
