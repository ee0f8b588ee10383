#pragma once

// Deviations-form heterogeneous agent market map.
//
// The model state is the price deviation x_t = p_t - p*, driven by
//
//     R x_t = sum_h n_{h,t} (g_h x_{t-1} + b_h) + eps_t
//     n_{h,t} = softmax_h(beta * U_{h,t-1})
//     U_{h,t-1} = (x_{t-1} - R x_{t-2}) (g_h x_{t-3} + b_h - R x_{t-2}) / (a sigma^2)
//
// Everything here is a pure function of its arguments.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ham {

/// Linear belief rule f = g * x_{t-1} + b, with an optional fitness memory.
struct Strategy {
    double g = 0.0;  ///< trend extrapolation coefficient
    double b = 0.0;  ///< bias, in price-deviation units
    int m = 1;       ///< fitness memory length in periods (1 = one-lag fitness)

    [[nodiscard]] bool is_fundamentalist() const noexcept { return g == 0.0 && b == 0.0; }

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct MarketConfig {
    double R = 1.1;                ///< gross risk-free rate 1 + r
    double beta = 300.0;           ///< intensity of choice
    double risk_term = 1.0;        ///< the product a * sigma^2
    int H = 5;                     ///< number of strategies
    double noise_halfwidth = 0.05; ///< eps_t ~ U(-w, w)
    double ybar = 1.0;             ///< expected dividend, only used for price levels

    /// Throws InvalidConfig when an invariant is violated.
    void validate() const;
};

/// Explicit state of the market map between two periods.
struct MarketState {
    std::vector<double> x_history;  ///< most recent deviation last
    Eigen::VectorXd fitness;        ///< U_{h,t-1}, memory-averaged where m > 1
    Eigen::VectorXd one_lag_fitness;///< U_{h,t-1} with m = 1
    Eigen::VectorXd fractions;      ///< n_{h,t}

    /// Zero deviations (enough to cover `max_memory`) and uniform fractions.
    static MarketState initial(int H, int max_memory = 1);
};

/// Fundamental price ybar / r of an i.i.d. dividend stream.
[[nodiscard]] double fundamental_price(double ybar, double r);

[[nodiscard]] inline double forecast(const Strategy& s, double x_prev) noexcept {
    return s.g * x_prev + s.b;
}

/// Realized one-period fitness given x_{t-1}, x_{t-2}, x_{t-3}.
[[nodiscard]] double fitness_one_lag(double x1, double x2, double x3, const Strategy& s,
                                     const MarketConfig& cfg) noexcept;

/// Average of the last `s.m` one-lag fitness terms.
///
/// `x_window` is chronological (most recent last) and must hold at least
/// `s.m + 2` points; the last three entries are x_{t-3}, x_{t-2}, x_{t-1}.
[[nodiscard]] double fitness_memory(std::span<const double> x_window, const Strategy& s,
                                    const MarketConfig& cfg);

/// Discrete-choice fractions exp(beta U_h) / Z, computed with max-subtraction.
[[nodiscard]] Eigen::VectorXd update_fractions(const Eigen::Ref<const Eigen::VectorXd>& fitness,
                                               double beta);

/// One step of the deviations map: (sum_h n_h f_h + eps) / R.
[[nodiscard]] double step_deviation(const Eigen::Ref<const Eigen::VectorXd>& fractions,
                                    std::span<const Strategy> strategies, double x_prev, double eps,
                                    const MarketConfig& cfg);

/// Market clearing price x + p*.
[[nodiscard]] double reconstruct_price(double x, const MarketConfig& cfg);

/// Advances `state` by one period and returns the new deviation.
///
/// Fitness uses each strategy's memory length (m = 1 is one-lag fitness).
double advance(MarketState& state, std::span<const Strategy> strategies, double eps,
               const MarketConfig& cfg);

}  // namespace ham
