#pragma once

// CSV and JSON serialization of samples, aggregate rows and empirical reports.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ham/aggregate.hpp"
#include "ham/config.hpp"
#include "ham/empirical.hpp"
#include "ham/montecarlo.hpp"

namespace ham::io {

/// Aggregate row of one sweep cell of one setup.
struct CellReport {
    std::string setup;
    double beta = 0.0;
    double level = 0.0;
    bool stochastic = false;
    std::uint64_t seed = 0;
    stats::StatReport report;
};

/// Long format, one row per observation: run_id,period,segment,x.
/// Periods are 1-based; b and a rows repeat the matching B and A observations.
void write_samples_csv(std::ostream& out, const RunSamples& samples, const RunConfig& cfg);

/// Header plus one row per cell; the 14 result columns follow setup,beta,level.
void write_stat_reports_csv(std::ostream& out, const std::vector<CellReport>& cells);
[[nodiscard]] nlohmann::json stat_reports_json(const std::vector<CellReport>& cells);
/// Inverse of stat_reports_json. Throws InvalidConfig on a schema mismatch.
[[nodiscard]] std::vector<CellReport> stat_reports_from_json(const nlohmann::json& doc);

/// Table-2 shaped rows: B and A per event, then the summary row.
void write_empirical_csv(std::ostream& out, const empirical::EmpiricalReport& report);
[[nodiscard]] nlohmann::json empirical_json(const empirical::EmpiricalReport& report);

[[nodiscard]] nlohmann::json config_json(const ExperimentConfig& cfg);

/// Shortest decimal text that round-trips (NaN as "nan").
[[nodiscard]] std::string format_number(double v);

}  // namespace ham::io
