#include "ham/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ham/errors.hpp"

namespace ham {

void MarketConfig::validate() const {
    if (!(R > 1.0) || !std::isfinite(R)) throw InvalidConfig("R must be a finite value > 1");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidConfig("beta must be finite and >= 0");
    if (!(risk_term > 0.0) || !std::isfinite(risk_term))
        throw InvalidConfig("risk_term must be finite and > 0");
    if (H < 1) throw InvalidConfig("H must be >= 1");
    if (!(noise_halfwidth >= 0.0) || !std::isfinite(noise_halfwidth))
        throw InvalidConfig("noise_halfwidth must be finite and >= 0");
    if (!(ybar > 0.0) || !std::isfinite(ybar)) throw InvalidConfig("ybar must be finite and > 0");
}

MarketState MarketState::initial(int H, int max_memory) {
    if (H < 1) throw InvalidConfig("H must be >= 1");
    MarketState state;
    const int retained = std::max(3, std::max(max_memory, 1) + 3);
    state.x_history.assign(static_cast<std::size_t>(retained), 0.0);
    state.fitness = Eigen::VectorXd::Zero(H);
    state.one_lag_fitness = Eigen::VectorXd::Zero(H);
    state.fractions = Eigen::VectorXd::Constant(H, 1.0 / H);
    return state;
}

double fundamental_price(double ybar, double r) {
    if (!(r > 0.0)) throw std::domain_error("undiscounted dividend stream: r must be > 0");
    return ybar / r;
}

double fitness_one_lag(double x1, double x2, double x3, const Strategy& s,
                       const MarketConfig& cfg) noexcept {
    return (x1 - cfg.R * x2) * (forecast(s, x3) - cfg.R * x2) / cfg.risk_term;
}

double fitness_memory(std::span<const double> x_window, const Strategy& s,
                      const MarketConfig& cfg) {
    if (s.m < 1) throw InvalidSpec("memory length must be >= 1");
    const auto m = static_cast<std::size_t>(s.m);
    if (x_window.size() < m + 2) {
        throw InsufficientHistory("memory fitness needs " + std::to_string(m + 2) +
                                  " points, got " + std::to_string(x_window.size()));
    }
    const std::size_t last = x_window.size() - 1;
    double sum = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
        sum += fitness_one_lag(x_window[last - l], x_window[last - 1 - l], x_window[last - 2 - l],
                               s, cfg);
    }
    return sum / static_cast<double>(m);
}

Eigen::VectorXd update_fractions(const Eigen::Ref<const Eigen::VectorXd>& fitness, double beta) {
    if (fitness.size() == 0) throw std::invalid_argument("update_fractions: empty fitness vector");
    // beta * (U_h - max U) keeps the exponent <= 0 and is invariant to shifts of U.
    const double top = fitness.maxCoeff();
    const Eigen::ArrayXd weights = (beta * (fitness.array() - top)).exp();
    return (weights / weights.sum()).matrix();
}

double step_deviation(const Eigen::Ref<const Eigen::VectorXd>& fractions,
                      std::span<const Strategy> strategies, double x_prev, double eps,
                      const MarketConfig& cfg) {
    if (static_cast<std::size_t>(fractions.size()) != strategies.size())
        throw std::invalid_argument("step_deviation: fractions and strategies differ in length");
    double demand = 0.0;
    for (std::size_t h = 0; h < strategies.size(); ++h) {
        demand += fractions[static_cast<Eigen::Index>(h)] * forecast(strategies[h], x_prev);
    }
    return (demand + eps) / cfg.R;
}

double reconstruct_price(double x, const MarketConfig& cfg) {
    return x + fundamental_price(cfg.ybar, cfg.R - 1.0);
}

double advance(MarketState& state, std::span<const Strategy> strategies, double eps,
               const MarketConfig& cfg) {
    const auto H = static_cast<Eigen::Index>(strategies.size());
    if (state.fitness.size() != H) {
        state.fitness.setZero(H);
        state.one_lag_fitness.setZero(H);
    }
    const auto& xs = state.x_history;
    if (xs.size() < 3) throw InsufficientHistory("market state holds fewer than 3 deviations");
    const std::size_t n = xs.size();
    const double x1 = xs[n - 1];
    const double x2 = xs[n - 2];
    const double x3 = xs[n - 3];
    const std::span<const double> window(xs);
    for (Eigen::Index h = 0; h < H; ++h) {
        const Strategy& s = strategies[static_cast<std::size_t>(h)];
        state.one_lag_fitness[h] = fitness_one_lag(x1, x2, x3, s, cfg);
        state.fitness[h] = s.m == 1 ? state.one_lag_fitness[h] : fitness_memory(window, s, cfg);
    }
    state.fractions = update_fractions(state.fitness, cfg.beta);
    const double x = step_deviation(state.fractions, strategies, x1, eps, cfg);
    state.x_history.push_back(x);
    return x;
}

}  // namespace ham
