#include "ham/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ham/errors.hpp"
#include "ham/parallel.hpp"

namespace ham {

namespace {

// Independent streams inside one run. Keeping noise apart from the parameter
// draws makes the pre-break segment identical with and without a break.
enum Stream : std::uint64_t { kStrategies = 1, kNoise = 2, kMeta = 4 };

Rng stream(std::uint64_t seed, Stream s) { return Rng(derive_seed(seed, s)); }

std::vector<BreakSpec> draw_stochastic_intensities(std::span<const BreakSpec> breaks, Rng& rng) {
    std::vector<BreakSpec> out(breaks.begin(), breaks.end());
    for (auto& brk : out) {
        if (brk.kind == BreakKind::overconfidence) {
            std::uniform_real_distribution<double> c(kOverconfidenceRange.lo, kOverconfidenceRange.hi);
            const double v = c(rng);
            brk.intensity_g = brk.touches_trend() ? v : 0.0;
            brk.intensity_b = brk.touches_bias() ? v : 0.0;
        } else if (brk.kind == BreakKind::sentiment) {
            std::uniform_real_distribution<double> g(kSentimentTrendRange.lo, kSentimentTrendRange.hi);
            std::uniform_real_distribution<double> b(kSentimentBiasRange.lo, kSentimentBiasRange.hi);
            const double vg = g(rng);
            const double vb = b(rng);
            brk.intensity_g = brk.touches_trend() ? vg : 0.0;
            brk.intensity_b = brk.touches_bias() ? vb : 0.0;
        }
    }
    return out;
}

const BreakSpec* find_kind(std::span<const BreakSpec> breaks, BreakKind kind) {
    for (const auto& b : breaks)
        if (b.kind == kind) return &b;
    return nullptr;
}

}  // namespace

std::vector<double> default_beta_grid() {
    std::vector<double> out;
    for (int k = 0; k < 10; ++k) out.push_back(5.0 + 55.0 * k);
    return out;
}

std::vector<double> default_intensity_levels() {
    std::vector<double> out;
    for (int k = 1; k <= 10; ++k) out.push_back(k / 10.0);
    return out;
}

int RunConfig::burn() const {
    return static_cast<int>(std::ceil(T * burn_frac - 1e-9));
}

bool RunConfig::has_break(BreakKind kind) const { return find_break(kind) != nullptr; }

const BreakSpec* RunConfig::find_break(BreakKind kind) const { return find_kind(breaks, kind); }

void RunConfig::validate() const {
    market.validate();
    gen.validate();
    if (T < 4) throw InvalidConfig("T must be >= 4");
    if (!(burn_frac > 0.0 && burn_frac < 0.5)) throw InvalidConfig("burn_frac must lie in (0, 0.5)");
    if (bpd < 2 || bpd >= T) throw InvalidConfig("bpd must satisfy 1 < bpd < T");
    if (window < 0) throw InvalidConfig("window must be >= 0");
    if (n_runs < 1) throw InvalidConfig("n_runs must be >= 1");
    const int before = bpd - 1 - burn();
    const int after = T - burn() - (bpd - 1);
    if (before < 1 || after < 1)
        throw InvalidConfig("burn-in leaves no observations on one side of the break");
    if (window > before || window > after)
        throw InvalidConfig("window (" + std::to_string(window) + ") exceeds a side of the break (" +
                            std::to_string(std::min(before, after)) + " points)");
    int seen[4] = {0, 0, 0, 0};
    for (const auto& brk : breaks) {
        brk.validate();
        if (brk.kind != BreakKind::none && ++seen[static_cast<int>(brk.kind)] > 1)
            throw InvalidConfig("break kind '" + to_string(brk.kind) + "' listed twice");
        if (brk.kind == BreakKind::herding && market.H < 2)
            throw InvalidConfig("herding needs H >= 2");
    }
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(mix64(parent) ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

std::uint64_t run_seed(std::uint64_t master, int run_index) noexcept {
    return derive_seed(master, 0x1000 + static_cast<std::uint64_t>(run_index));
}

std::vector<int> memory_lengths(int H, Rng& rng) {
    if (H < 1) throw InvalidConfig("memory_lengths: H must be >= 1");
    std::uniform_int_distribution<int> draw(0, kMaxMemory);
    std::vector<int> out(static_cast<std::size_t>(H));
    for (auto& m : out) m = std::max(1, draw(rng));
    return out;
}

RunTrace simulate_run_trace(const RunConfig& cfg, std::uint64_t seed) {
    cfg.validate();

    Rng strategy_rng = stream(seed, kStrategies);
    Rng noise_rng = stream(seed, kNoise);
    Rng meta_rng = stream(seed, kMeta);

    MarketConfig market = cfg.market;
    StrategyGenSpec gen = cfg.gen;
    gen.force_fundamentalist = gen.force_fundamentalist || cfg.extensions.fundamentalist_default;

    RunTrace trace;
    trace.breaks = cfg.breaks;
    if (cfg.extensions.stochastic_params) {
        std::uniform_real_distribution<double> beta(kStochasticBetaLo, kStochasticBetaHi);
        market.beta = beta(meta_rng);
        trace.breaks = draw_stochastic_intensities(cfg.breaks, meta_rng);
    }
    trace.beta = market.beta;

    std::vector<Strategy> strategies = generate_strategies(gen, market.H, strategy_rng);
    int max_memory = 1;
    if (cfg.extensions.memory) {
        trace.memory = memory_lengths(market.H, meta_rng);
        for (std::size_t h = 0; h < strategies.size(); ++h) strategies[h].m = trace.memory[h];
        max_memory = *std::max_element(trace.memory.begin(), trace.memory.end());
    }
    trace.strategies_before = strategies;

    const BreakSpec* sentiment = find_kind(trace.breaks, BreakKind::sentiment);
    const BreakSpec* overconfidence = find_kind(trace.breaks, BreakKind::overconfidence);
    const bool herding = find_kind(trace.breaks, BreakKind::herding) != nullptr;
    const std::size_t herd_index = strategies.size() - 1;

    std::uniform_real_distribution<double> noise(-market.noise_halfwidth, market.noise_halfwidth);
    MarketState state = MarketState::initial(market.H, max_memory);
    const std::size_t pad = state.x_history.size();
    state.x_history.reserve(pad + static_cast<std::size_t>(cfg.T));

    for (int t = 1; t <= cfg.T; ++t) {
        if (t == cfg.bpd) {
            if (sentiment != nullptr) {
                // The whole population is redrawn from the shifted generator; reusing the
                // original deviates keeps the comparison with the no-break run paired.
                strategies = redraw_under(strategies, gen, apply_sentiment(gen, *sentiment));
            }
            if (overconfidence != nullptr) {
                for (auto& s : strategies) s = apply_overconfidence(s, *overconfidence);
            }
        }
        if (herding && t >= cfg.bpd) {
            strategies = apply_herding(strategies, state.one_lag_fitness, herd_index);
        }
        const double eps = noise(noise_rng);
        advance(state, strategies, eps, market);
    }

    trace.series.assign(state.x_history.begin() + static_cast<std::ptrdiff_t>(pad),
                        state.x_history.end());
    trace.strategies_after = std::move(strategies);
    return trace;
}

std::vector<double> simulate_run(const RunConfig& cfg, std::uint64_t seed) {
    return simulate_run_trace(cfg, seed).series;
}

RunParts split_samples(std::span<const double> series, const RunConfig& cfg) {
    if (series.size() != static_cast<std::size_t>(cfg.T))
        throw std::invalid_argument("split_samples: series length " + std::to_string(series.size()) +
                                    " differs from T = " + std::to_string(cfg.T));
    const auto burn = static_cast<std::size_t>(cfg.burn());
    const auto brk = static_cast<std::size_t>(cfg.bpd - 1);  // 0-based index of period bpd
    const std::size_t end = series.size() - burn;
    if (!(burn < brk && brk < end))
        throw InvalidConfig("split_samples: burn-in swallows one side of the break");
    const auto window = static_cast<std::size_t>(std::max(cfg.window, 0));
    if (window > brk - burn || window > end - brk)
        throw InvalidConfig("split_samples: window larger than a side of the break");

    RunParts parts;
    parts.B.assign(series.begin() + burn, series.begin() + brk);
    parts.A.assign(series.begin() + brk, series.begin() + end);
    parts.b.assign(parts.B.end() - window, parts.B.end());
    parts.a.assign(parts.A.begin(), parts.A.begin() + window);
    return parts;
}

RunSamples run_batch(const RunConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.n_runs);
    RunSamples out;
    out.runs.resize(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        const std::uint64_t seed = run_seed(cfg.seed, static_cast<int>(i));
        RunTrace trace = simulate_run_trace(cfg, seed);
        RunRecord& rec = out.runs[i];
        rec.run_id = static_cast<int>(i);
        rec.seed = seed;
        rec.beta = trace.beta;
        rec.breaks = std::move(trace.breaks);
        rec.memory = std::move(trace.memory);
        rec.parts = split_samples(trace.series, cfg);
    });
    for (const auto& rec : out.runs) {
        out.B.insert(out.B.end(), rec.parts.B.begin(), rec.parts.B.end());
        out.b.insert(out.b.end(), rec.parts.b.begin(), rec.parts.b.end());
        out.a.insert(out.a.end(), rec.parts.a.begin(), rec.parts.a.end());
        out.A.insert(out.A.end(), rec.parts.A.begin(), rec.parts.A.end());
    }
    return out;
}

std::vector<BreakSpec> breaks_at_level(std::span<const BreakSpec> breaks, double level) {
    std::vector<BreakSpec> out;
    out.reserve(breaks.size());
    for (const auto& b : breaks) {
        if (b.kind == BreakKind::overconfidence || b.kind == BreakKind::sentiment)
            out.push_back(BreakSpec::at_level(b.kind, b.target, b.sign, level));
        else
            out.push_back(b);
    }
    return out;
}

std::vector<SweepCell> sweep_cells(const RunConfig& base, std::span<const double> betas,
                                   std::span<const double> levels) {
    if (betas.empty() || levels.empty()) throw InvalidConfig("sweep: beta and intensity lists must be non-empty");
    const bool has_intensity =
        base.has_break(BreakKind::overconfidence) || base.has_break(BreakKind::sentiment);

    std::vector<SweepCell> cells;
    if (base.extensions.stochastic_params) {
        SweepCell cell{base, 0.0, 0.0, true};
        cell.cfg.seed = derive_seed(base.seed, 0);
        cells.push_back(std::move(cell));
        return cells;
    }
    const std::vector<double> one_level{1.0};
    const std::span<const double> level_axis = has_intensity ? levels : std::span<const double>(one_level);
    for (double beta : betas) {
        for (double level : level_axis) {
            SweepCell cell{base, beta, has_intensity ? level : 0.0, false};
            cell.cfg.market.beta = beta;
            if (has_intensity) cell.cfg.breaks = breaks_at_level(base.breaks, level);
            cell.cfg.seed = derive_seed(base.seed, cells.size());
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::vector<SweepResult> sweep_grid(const RunConfig& base, std::span<const double> betas,
                                    std::span<const double> levels) {
    std::vector<SweepResult> out;
    for (auto& cell : sweep_cells(base, betas, levels)) {
        RunSamples samples = run_batch(cell.cfg);
        out.push_back(SweepResult{std::move(cell), std::move(samples)});
    }
    return out;
}

}  // namespace ham
