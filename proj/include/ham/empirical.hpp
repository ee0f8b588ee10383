#pragma once

// Daily closing prices around crisis dates: loading, first differences,
// before/after windows pooled across tickers, and the descriptive comparison.

#include <array>
#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ham/stats.hpp"

namespace ham::empirical {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws std::invalid_argument.
[[nodiscard]] Date parse_date(std::string_view text);
[[nodiscard]] std::string format_date(Date d);

struct Observation {
    Date date;
    double close = 0.0;
};

struct PriceSeries {
    std::string ticker;
    std::vector<Observation> observations;  ///< strictly increasing dates
};

struct PriceData {
    std::vector<PriceSeries> series;  ///< sorted by ticker
    std::size_t dropped_missing = 0;  ///< rows without a close
    std::vector<std::string> log;

    [[nodiscard]] const PriceSeries* find(std::string_view ticker) const;
};

/// Reads `date,ticker,close` rows (an optional header line is skipped).
///
/// Rows with an empty or NA close are dropped and counted. Malformed rows and
/// duplicate (date, ticker) pairs throw DataError carrying the line number.
[[nodiscard]] PriceData parse_prices(std::istream& in);
[[nodiscard]] PriceData load_prices(const std::filesystem::path& path);

/// First differences close_t - close_{t-1} over consecutive observations.
[[nodiscard]] std::vector<double> difference(const PriceSeries& series);

struct DatedDifference {
    Date date;  ///< date of the later close
    double value = 0.0;
};
[[nodiscard]] std::vector<DatedDifference> dated_differences(const PriceSeries& series);

struct Exclusion {
    std::string ticker;
    std::string reason;
};

struct EventSpec {
    std::string name;
    Date bpd;
    int window_days = 20;
    std::vector<std::string> tickers;
    std::vector<Exclusion> exclusions;
    std::string description;
};

/// Reads `{"events": [...]}`; throws DataError on schema violations.
[[nodiscard]] std::vector<EventSpec> parse_events(std::string_view json_text);
[[nodiscard]] std::vector<EventSpec> load_events(const std::filesystem::path& path);

struct WindowSplit {
    std::vector<double> before;
    std::vector<double> after;
    std::vector<Date> before_dates;  ///< trading days whose differences form "before"
    std::vector<Date> after_dates;
    std::vector<std::string> included;
    std::vector<std::string> log;
};

/// Splits differences around the event date.
///
/// The trading calendar is the union of the event tickers' dates. "Before" holds
/// the `window_days` trading days up to and including the break date (the last
/// trading day on or before it), "after" the next `window_days` trading days.
/// Tickers lacking history that covers both windows are skipped and logged.
[[nodiscard]] WindowSplit window_split(const PriceData& data, const EventSpec& event);

/// Direction of a before/after change: +1, -1, or 0 when equal.
[[nodiscard]] int direction(double before, double after) noexcept;

struct EventResult {
    std::string name;
    Date bpd;
    stats::MomentSummary before;
    stats::MomentSummary after;
    stats::TestResult mean_test;
    stats::TestResult variance_test;
    stats::TestResult jb_before;
    stats::TestResult jb_after;
    int mean_dir = 0;
    int var_dir = 0;
    int skew_dir = 0;
    int kurt_dir = 0;
    int mean_stars = 0;
    int var_stars = 0;
    double var_delta_pct = 0.0;
    double kurt_delta_pct = 0.0;
    std::vector<std::string> included;
};

/// Majority direction of one statistic across events.
struct Tally {
    int up = 0;
    int down = 0;
    int n_events = 0;
    int majority = 0;  ///< +1, -1, or 0 with no change anywhere
    int stars = 0;     ///< weakest significance among the majority events

    [[nodiscard]] int count() const noexcept { return majority > 0 ? up : majority < 0 ? down : 0; }
    /// e.g. "4/5 ↑***"; a tied vote reads "2↑ 2↓ of 4"
    [[nodiscard]] std::string label() const;
};

inline constexpr std::array<const char*, 4> kTallyStats{"mean", "variance", "skewness", "kurtosis"};

struct EmpiricalReport {
    std::vector<EventResult> events;
    std::array<Tally, 4> summary;  ///< mean, variance, skewness, kurtosis
    std::vector<std::string> log;
};

/// Runs every event; events with unusable samples are skipped and logged.
[[nodiscard]] EmpiricalReport empirical_report(const std::vector<EventSpec>& events, const PriceData& data);

/// Tally over already computed event results.
[[nodiscard]] std::array<Tally, 4> tally(const std::vector<EventResult>& events);

}  // namespace ham::empirical
