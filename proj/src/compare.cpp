#include "ham/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ham/errors.hpp"
#include "ham/report_io.hpp"

namespace ham::compare {

namespace {

using nlohmann::json;

double ratio(int num, int den) {
    return den > 0 ? static_cast<double>(num) / den : std::numeric_limits<double>::quiet_NaN();
}

double finite_or_inf(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

// Strictly on one side of one half; an exact half has no direction.
int side(double share) { return share > 0.5 ? 1 : share < 0.5 ? -1 : 0; }

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

Pattern pattern_of(const stats::StatReport& r) {
    Pattern p;
    p.label = r.label;
    p.share = {ratio(r.mean_up, r.n_runs), ratio(r.var_up, r.n_runs), ratio(r.skew_up, r.n_shape_runs),
               ratio(r.kurt_down, r.n_shape_runs)};
    p.var_delta_pct = r.var_delta_pct;
    p.kurt_delta_pct = r.kurt_delta_pct;
    return p;
}

Pattern pattern_of(const empirical::EmpiricalReport& report, std::string label) {
    Pattern p;
    p.label = std::move(label);
    const auto& s = report.summary;
    for (std::size_t k = 0; k < 4; ++k) {
        // the kurtosis column counts decreases
        p.share[k] = ratio(k == 3 ? s[k].down : s[k].up, s[k].n_events);
        p.marked[k] = s[k].majority != 0 && s[k].stars > 0;
    }
    std::vector<double> dv;
    std::vector<double> dk;
    for (const auto& e : report.events) {
        dv.push_back(e.var_delta_pct);
        dk.push_back(e.kurt_delta_pct);
    }
    p.var_delta_pct = mean_of(dv);
    p.kurt_delta_pct = mean_of(dk);
    return p;
}

std::vector<MatchRow> rank(const std::vector<Pattern>& simulated, const Pattern& reference) {
    std::vector<MatchRow> rows;
    for (const auto& p : simulated) {
        MatchRow row;
        row.label = p.label;
        row.direction_match = true;
        row.significant_match = true;
        for (std::size_t k = 0; k < 4; ++k) {
            const bool same = side(p.share[k]) == side(reference.share[k]);
            row.direction_match = row.direction_match && same;
            if (reference.marked[k]) row.significant_match = row.significant_match && same;
            row.direction_distance += std::abs(p.share[k] - reference.share[k]);
        }
        row.direction_distance = finite_or_inf(row.direction_distance);
        row.magnitude_distance = finite_or_inf(std::abs(p.var_delta_pct - reference.var_delta_pct) / 100.0 +
                                               std::abs(p.kurt_delta_pct - reference.kurt_delta_pct) / 100.0);
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const MatchRow& a, const MatchRow& b) {
        if (a.significant_match != b.significant_match) return a.significant_match;
        if (a.direction_distance != b.direction_distance) return a.direction_distance < b.direction_distance;
        return a.magnitude_distance < b.magnitude_distance;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
    return rows;
}

std::vector<Pattern> simulated_patterns(const json& doc) {
    std::vector<Pattern> out;
    for (const auto& cell : io::stat_reports_from_json(doc)) {
        Pattern p = pattern_of(cell.report);
        if (!cell.stochastic && cell.level > 0.0)
            p.label = cell.setup + " @beta=" + io::format_number(cell.beta) + ",level=" + io::format_number(cell.level);
        else if (!cell.stochastic)
            p.label = cell.setup + " @beta=" + io::format_number(cell.beta);
        out.push_back(std::move(p));
    }
    return out;
}

Pattern reference_pattern(const json& doc) {
    const std::string kind = doc.is_object() ? doc.value("kind", "") : "";
    if (kind == "stat_reports") {
        auto sims = simulated_patterns(doc);
        if (sims.size() != 1) throw InvalidConfig("reference simulation report must hold exactly one row");
        return sims.front();
    }
    if (kind != "empirical_report") throw InvalidConfig("reference is neither an empirical nor a simulation report");
    Pattern p;
    p.label = "empirical";
    try {
        const json& s = doc.at("summary");
        for (std::size_t k = 0; k < 4; ++k) {
            const json& t = s.at(empirical::kTallyStats[k]);
            const int n = t.at("n_events").get<int>();
            p.share[k] = ratio(k == 3 ? t.at("down").get<int>() : t.at("up").get<int>(), n);
            p.marked[k] = t.at("majority").get<int>() != 0 && t.at("stars").get<int>() > 0;
        }
        std::vector<double> dv;
        std::vector<double> dk;
        for (const auto& e : doc.at("events")) {
            dv.push_back(e.at("var_delta_pct").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                         : e.at("var_delta_pct").get<double>());
            dk.push_back(e.at("kurt_delta_pct").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                          : e.at("kurt_delta_pct").get<double>());
        }
        p.var_delta_pct = mean_of(dv);
        p.kurt_delta_pct = mean_of(dk);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("empirical report: ") + e.what());
    }
    return p;
}

}  // namespace ham::compare
