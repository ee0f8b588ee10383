#pragma once

// Seeded Monte Carlo runs with a single mid-series behavioral break, the
// four-way B/b/a/A sample construction, and the beta x intensity sweep.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ham/behavior.hpp"
#include "ham/core.hpp"

namespace ham {

struct Extensions {
    bool fundamentalist_default = false;  ///< strategy 0 always g = b = 0
    bool stochastic_params = false;       ///< beta and intensities drawn per run
    bool memory = false;                  ///< memory lengths m_h drawn per strategy

    friend bool operator==(const Extensions&, const Extensions&) = default;
};

/// Default intensity-of-choice grid: 5, 60, ..., 500.
[[nodiscard]] std::vector<double> default_beta_grid();
/// Default intensity levels 0.1, 0.2, ..., 1.0 (fractions of each element's maximum).
[[nodiscard]] std::vector<double> default_intensity_levels();

inline constexpr double kStochasticBetaLo = 5.0;
inline constexpr double kStochasticBetaHi = 500.0;
inline constexpr int kMaxMemory = 20;

struct RunConfig {
    MarketConfig market;
    StrategyGenSpec gen;
    /// Break elements in force from `bpd` on. Composition order is fixed
    /// (sentiment, then overconfidence, then herding) regardless of list order.
    std::vector<BreakSpec> breaks;
    int T = 250;
    int bpd = 126;          ///< 1-based period of the first broken step
    double burn_frac = 0.10;
    int window = 20;
    std::uint64_t seed = 0;
    Extensions extensions;
    int n_runs = 100;
    int threads = 1;

    /// Throws InvalidConfig / InvalidSpec on any invariant violation.
    void validate() const;

    /// Number of points trimmed from each end.
    [[nodiscard]] int burn() const;
    [[nodiscard]] bool has_break(BreakKind kind) const;
    [[nodiscard]] const BreakSpec* find_break(BreakKind kind) const;
};

/// Per-run B/b/a/A parts of one deviation series.
struct RunParts {
    std::vector<double> B;
    std::vector<double> b;
    std::vector<double> a;
    std::vector<double> A;
};

/// Everything one run produced besides the pooled samples.
struct RunRecord {
    int run_id = 0;
    std::uint64_t seed = 0;
    double beta = 0.0;
    std::vector<BreakSpec> breaks;  ///< effective (possibly drawn) break specs
    std::vector<int> memory;        ///< per-strategy memory, empty without the extension
    RunParts parts;
};

struct RunTrace {
    std::vector<double> series;  ///< x_1 ... x_T
    double beta = 0.0;
    std::vector<BreakSpec> breaks;
    std::vector<int> memory;
    std::vector<Strategy> strategies_before;
    std::vector<Strategy> strategies_after;  ///< parameters in force at period T
};

struct RunSamples {
    std::vector<double> B;
    std::vector<double> b;
    std::vector<double> a;
    std::vector<double> A;
    std::vector<RunRecord> runs;  ///< ordered by run index
};

/// splitmix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t z) noexcept;
/// Child seed `index` of `parent`; a pure function of its arguments.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;
/// Seed of run `run_index` under master `seed`.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t master, int run_index) noexcept;

/// Integer memory lengths drawn on {0, ..., 20}, with 0 mapped to 1.
[[nodiscard]] std::vector<int> memory_lengths(int H, Rng& rng);

/// Full trace of one run; deterministic in (cfg, seed).
[[nodiscard]] RunTrace simulate_run_trace(const RunConfig& cfg, std::uint64_t seed);
/// The length-T deviation series of one run.
[[nodiscard]] std::vector<double> simulate_run(const RunConfig& cfg, std::uint64_t seed);

/// Four-way split of a length-T series.
[[nodiscard]] RunParts split_samples(std::span<const double> series, const RunConfig& cfg);

/// n_runs independent runs pooled in run order. Independent of cfg.threads.
[[nodiscard]] RunSamples run_batch(const RunConfig& cfg);

/// One cell of a sweep.
struct SweepCell {
    RunConfig cfg;
    double beta = 0.0;        ///< 0 for stochastic cells (drawn per run)
    double level = 1.0;       ///< intensity level; 0 when the setup has no intensity
    bool stochastic = false;  ///< beta and intensities drawn per run
};

/// Cartesian beta x intensity cells (or a single cell for stochastic parameters).
[[nodiscard]] std::vector<SweepCell> sweep_cells(const RunConfig& base, std::span<const double> betas,
                                                 std::span<const double> levels);

struct SweepResult {
    SweepCell cell;
    RunSamples samples;
};

[[nodiscard]] std::vector<SweepResult> sweep_grid(const RunConfig& base, std::span<const double> betas,
                                                  std::span<const double> levels);

/// Rebuilds each break's intensities at `level` (fraction of the element maximum).
[[nodiscard]] std::vector<BreakSpec> breaks_at_level(std::span<const BreakSpec> breaks, double level);

}  // namespace ham
