#pragma once

// Strategy populations and the behavioral break transformations.

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ham/core.hpp"

namespace ham {

using Rng = std::mt19937_64;

/// Normal generators for the trend and bias parameters.
struct StrategyGenSpec {
    double g_mean = 0.0;
    double g_sd = 0.4;
    double b_mean = 0.0;
    double b_sd = 0.3;
    bool force_fundamentalist = false;  ///< strategy 0 is pinned to g = b = 0

    void validate() const;
};

enum class BreakKind { none, herding, overconfidence, sentiment };
enum class BreakTarget { bias_only, trend_only, both, mixed };
enum class Sign { positive, negative };

/// Admissible intensity ranges of the break elements.
struct IntensityRange {
    double lo;
    double hi;

    [[nodiscard]] double at_level(double level) const noexcept { return hi * level; }
    [[nodiscard]] bool contains(double v) const noexcept;
};

inline constexpr IntensityRange kOverconfidenceRange{0.05, 0.5};
inline constexpr IntensityRange kSentimentTrendRange{0.04, 0.4};
inline constexpr IntensityRange kSentimentBiasRange{0.03, 0.3};

/// One behavioral element injected at the break point.
///
/// Intensities are magnitudes; for sentiment the direction comes from `sign`,
/// and `mixed` gives the trend shift the opposite sign of the bias shift.
struct BreakSpec {
    BreakKind kind = BreakKind::none;
    BreakTarget target = BreakTarget::both;
    double intensity_g = 0.0;
    double intensity_b = 0.0;
    Sign sign = Sign::positive;

    [[nodiscard]] bool touches_trend() const noexcept {
        return target == BreakTarget::trend_only || target == BreakTarget::both ||
               target == BreakTarget::mixed;
    }
    [[nodiscard]] bool touches_bias() const noexcept {
        return target == BreakTarget::bias_only || target == BreakTarget::both ||
               target == BreakTarget::mixed;
    }

    /// Throws InvalidSpec for out-of-range intensities or an invalid target.
    void validate() const;

    /// Break spec at a fraction `level` in (0, 1] of the element's maximum intensity.
    static BreakSpec at_level(BreakKind kind, BreakTarget target, Sign sign, double level);

    friend bool operator==(const BreakSpec&, const BreakSpec&) = default;
};

[[nodiscard]] std::string to_string(BreakKind kind);
[[nodiscard]] std::string to_string(BreakTarget target);
[[nodiscard]] std::string to_string(Sign sign);
[[nodiscard]] BreakKind parse_break_kind(const std::string& s);
[[nodiscard]] BreakTarget parse_break_target(const std::string& s);
[[nodiscard]] Sign parse_sign(const std::string& s);

/// Draws H strategies; deterministic for a given generator state.
[[nodiscard]] std::vector<Strategy> generate_strategies(const StrategyGenSpec& spec, int H, Rng& rng);

/// Magnitude scaling by (1 + c) of the targeted parameters.
[[nodiscard]] Strategy apply_overconfidence(const Strategy& s, const BreakSpec& spec);

/// Shifts the generator means; the spread is left alone.
[[nodiscard]] StrategyGenSpec apply_sentiment(const StrategyGenSpec& spec, const BreakSpec& brk);

/// Re-expresses strategies drawn under `from` as draws under `to`, reusing each
/// strategy's standardized normal deviates. A forced fundamentalist stays at (0, 0);
/// memory lengths are kept.
[[nodiscard]] std::vector<Strategy> redraw_under(std::span<const Strategy> strategies,
                                                 const StrategyGenSpec& from, const StrategyGenSpec& to);

/// Copies (g, b) of the previous period's fittest other strategy into `herd_index`.
///
/// Ties go to the lowest index. Memory length is not copied.
[[nodiscard]] std::vector<Strategy> apply_herding(std::span<const Strategy> strategies,
                                                  const Eigen::Ref<const Eigen::VectorXd>& fitness_prev,
                                                  std::size_t herd_index);

}  // namespace ham
