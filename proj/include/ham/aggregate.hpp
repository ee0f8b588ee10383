#pragma once

// Per-setup aggregation of a Monte Carlo batch into one results row:
// before/after moment-shift counts, average percentage changes, and
// non-rejection counts of the per-run distribution and normality tests.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ham/montecarlo.hpp"
#include "ham/stats.hpp"

namespace ham::stats {

/// Column order of the CvM pairs.
inline constexpr std::array<const char*, 4> kCvmPairs{"B-b", "b-a", "a-A", "A-B"};
/// Column order of the JB samples.
inline constexpr std::array<const char*, 4> kJbSamples{"B", "b", "a", "A"};

struct AggregateOptions {
    int n_perm = 999;
    std::uint64_t perm_seed = 0;
    int threads = 1;
    bool pooled_tests = false;  ///< additionally test the pooled samples
};

/// Tests on the pooled B/b/a/A samples (comparison mode).
struct PooledTests {
    std::array<std::optional<TestResult>, 4> cvm;
    std::array<std::optional<TestResult>, 4> jb;
};

struct StatReport {
    std::string label;
    int n_runs = 0;

    int mean_up = 0;
    int var_up = 0;
    int skew_up = 0;
    int kurt_down = 0;
    /// Runs whose skewness/kurtosis are defined on both sides (denominator of skew_up and kurt_down).
    int n_shape_runs = 0;
    double var_delta_pct = 0.0;   ///< mean over runs of 100 (var_A - var_B) / |var_B|
    double kurt_delta_pct = 0.0;  ///< mean over runs of 100 (kurt_A - kurt_B) / |kurt_B|

    std::array<int, 4> cvm_nonreject{};  ///< B-b, b-a, a-A, A-B
    std::array<int, 4> cvm_applicable{};
    std::array<int, 4> jb_nonreject{};   ///< B, b, a, A
    std::array<int, 4> jb_applicable{};

    std::vector<int> flagged_runs;  ///< runs where at least one statistic was not applicable
    std::optional<PooledTests> pooled;

    /// The 14 numeric columns in report.csv order.
    [[nodiscard]] std::array<double, 14> row() const;
};

/// Seed of the permutation stream for (run, test slot).
[[nodiscard]] std::uint64_t test_seed(std::uint64_t perm_seed, int run_id, int slot) noexcept;

/// Aggregates a completed batch. Bit-reproducible for fixed seeds and any thread count.
[[nodiscard]] StatReport aggregate(const RunSamples& batch, const AggregateOptions& opts,
                                   std::string label = {});

}  // namespace ham::stats
