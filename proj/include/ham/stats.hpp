#pragma once

// Descriptive moments and the two-sample / normality tests used to compare
// the samples before and after a break.

#include <cstdint>
#include <span>
#include <vector>

namespace ham::stats {

struct MomentSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased, divisor n - 1
    double skewness = 0.0;  ///< m3 / m2^1.5 with divisor-n central moments
    double kurtosis = 0.0;  ///< m4 / m2^2, raw (normal = 3)
    double min = 0.0;
    double max = 0.0;
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool rejected_at_5pct = false;
};

inline constexpr double kAlpha = 0.05;

[[nodiscard]] TestResult make_result(double statistic, double p_value) noexcept;

/// Throws InsufficientSample for n < 4, DegenerateSample for zero variance.
[[nodiscard]] MomentSummary moments(std::span<const double> sample);

/// Mean and unbiased variance only; needs n >= 2 and never throws on zero variance.
struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
};
[[nodiscard]] MeanVar mean_var(std::span<const double> sample);

/// JB = n/6 (S^2 + (K - 3)^2 / 4) against chi-square(2). Needs n >= 8.
[[nodiscard]] TestResult jarque_bera(std::span<const double> sample);

/// Two-sample Cramer-von Mises statistic
///   T = N M / (N + M)^2 * sum over pooled points of (F_x - F_y)^2.
/// Tied values are evaluated once per distinct value, weighted by multiplicity.
[[nodiscard]] double cramer_von_mises_statistic(std::span<const double> x, std::span<const double> y);

/// CvM test with a seeded permutation p-value (1 + #{T_perm >= T}) / (n_perm + 1).
[[nodiscard]] TestResult cramer_von_mises_2s(std::span<const double> x, std::span<const double> y,
                                             int n_perm = 999, std::uint64_t perm_seed = 0);

/// Welch two-sample t test, two-sided.
[[nodiscard]] TestResult mean_difference_test(std::span<const double> x, std::span<const double> y);

/// F = s_x^2 / s_y^2 against F(n_x - 1, n_y - 1), two-sided.
[[nodiscard]] TestResult variance_ratio_test(std::span<const double> x, std::span<const double> y);

/// Number of significance stars for a p-value: 3 at 1%, 2 at 5%, 1 at 10%, else 0.
[[nodiscard]] int significance_stars(double p_value) noexcept;

}  // namespace ham::stats
