#pragma once

// Named break setups and the JSON experiment configuration.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ham/behavior.hpp"
#include "ham/empirical.hpp"
#include "ham/montecarlo.hpp"

namespace ham {

/// A labelled combination of break elements.
struct Setup {
    std::string label;
    std::vector<BreakSpec> breaks;
};

/// Parses a setup name such as "none", "herding", "overconfidence+trend",
/// "sentiment-mix" or a comma-joined combination ("herding,sentiment+bias").
/// Intensities are set at `level` of each element's maximum. Throws InvalidConfig.
[[nodiscard]] Setup parse_setup(std::string_view name, double level = 1.0);

/// The thirteen single-element setups in results-table order.
[[nodiscard]] std::vector<std::string> paper13_setup_names();

enum class GridMode {
    single,  ///< one cell at market.beta and `level`
    full,    ///< the beta x intensity-level sweep
};

struct ExperimentConfig {
    RunConfig run;                    ///< market, generator, extensions, sizes, seed
    std::vector<std::string> setups;  ///< setup names, see parse_setup
    double level = 1.0;               ///< intensity level of single-cell runs
    GridMode grid = GridMode::single;
    std::vector<double> betas = default_beta_grid();
    std::vector<double> levels = default_intensity_levels();
    std::uint64_t perm_seed = 0;
    int n_perm = 999;
    bool pooled_tests = false;
    std::string out_dir;
    std::vector<empirical::EventSpec> events;

    /// Throws InvalidConfig / InvalidSpec.
    void validate() const;
};

/// Strict parse: unknown keys and wrongly typed values throw InvalidConfig
/// naming the offending path.
[[nodiscard]] ExperimentConfig parse_experiment_config(std::string_view json_text);
[[nodiscard]] ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace ham
