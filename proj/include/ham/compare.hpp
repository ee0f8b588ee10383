#pragma once

// Ranking of simulated setups against the empirical direction pattern.

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "ham/aggregate.hpp"
#include "ham/empirical.hpp"

namespace ham::compare {

/// Shares of the four table directions: mean up, variance up, skewness up,
/// kurtosis down. `marked[k]` says the direction carries significance stars.
struct Pattern {
    std::string label;
    std::array<double, 4> share{};
    std::array<bool, 4> marked{};
    double var_delta_pct = 0.0;
    double kurt_delta_pct = 0.0;
};

[[nodiscard]] Pattern pattern_of(const stats::StatReport& report);
[[nodiscard]] Pattern pattern_of(const empirical::EmpiricalReport& report, std::string label = "empirical");

struct MatchRow {
    std::string label;
    int rank = 0;
    bool direction_match = false;    ///< every direction on the reference's side of 1/2
    bool significant_match = false;  ///< every starred reference direction reproduced
    double direction_distance = 0.0; ///< sum of |share - reference share|
    double magnitude_distance = 0.0; ///< |dVar - ref| / 100 + |dKurt - ref| / 100
};

/// Rows sorted best first: starred directions, then direction distance, then magnitude.
[[nodiscard]] std::vector<MatchRow> rank(const std::vector<Pattern>& simulated, const Pattern& reference);

/// Simulated patterns from a stat_reports document.
[[nodiscard]] std::vector<Pattern> simulated_patterns(const nlohmann::json& doc);
/// Reference pattern from an empirical_report document, or from a stat_reports
/// document holding exactly one row. Throws InvalidConfig otherwise.
[[nodiscard]] Pattern reference_pattern(const nlohmann::json& doc);

}  // namespace ham::compare
