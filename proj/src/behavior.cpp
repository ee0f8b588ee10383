#include "ham/behavior.hpp"

#include <cmath>
#include <stdexcept>

#include "ham/errors.hpp"

namespace ham {

namespace {

// Grid intensities such as 0.04 * 7 carry representation error.
constexpr double kRangeSlack = 1e-12;

}  // namespace

bool IntensityRange::contains(double v) const noexcept {
    return v >= lo - kRangeSlack && v <= hi + kRangeSlack;
}

void StrategyGenSpec::validate() const {
    if (!(g_sd > 0.0) || !std::isfinite(g_sd)) throw InvalidSpec("g_sd must be > 0");
    if (!(b_sd > 0.0) || !std::isfinite(b_sd)) throw InvalidSpec("b_sd must be > 0");
    if (!std::isfinite(g_mean) || !std::isfinite(b_mean))
        throw InvalidSpec("generator means must be finite");
}

void BreakSpec::validate() const {
    switch (kind) {
        case BreakKind::none:
        case BreakKind::herding:
            return;
        case BreakKind::overconfidence:
            if (target == BreakTarget::mixed)
                throw InvalidSpec("the mixed target applies to sentiment only");
            if (touches_trend() && !(intensity_g > 0.0))
                throw InvalidSpec("overconfidence intensity must be > 0");
            if (touches_bias() && !(intensity_b > 0.0))
                throw InvalidSpec("overconfidence intensity must be > 0");
            if (touches_trend() && !kOverconfidenceRange.contains(intensity_g))
                throw InvalidSpec("overconfidence trend intensity outside [0.05, 0.5]");
            if (touches_bias() && !kOverconfidenceRange.contains(intensity_b))
                throw InvalidSpec("overconfidence bias intensity outside [0.05, 0.5]");
            return;
        case BreakKind::sentiment:
            if (touches_trend() && !kSentimentTrendRange.contains(std::abs(intensity_g)))
                throw InvalidSpec("sentiment trend shift outside [0.04, 0.4]");
            if (touches_bias() && !kSentimentBiasRange.contains(std::abs(intensity_b)))
                throw InvalidSpec("sentiment bias shift outside [0.03, 0.3]");
            return;
    }
}

BreakSpec BreakSpec::at_level(BreakKind kind, BreakTarget target, Sign sign, double level) {
    if (!(level > 0.0 && level <= 1.0 + kRangeSlack))
        throw InvalidSpec("intensity level must lie in (0, 1]");
    BreakSpec spec;
    spec.kind = kind;
    spec.target = target;
    spec.sign = sign;
    if (kind == BreakKind::overconfidence) {
        spec.intensity_g = spec.touches_trend() ? kOverconfidenceRange.at_level(level) : 0.0;
        spec.intensity_b = spec.touches_bias() ? kOverconfidenceRange.at_level(level) : 0.0;
    } else if (kind == BreakKind::sentiment) {
        spec.intensity_g = spec.touches_trend() ? kSentimentTrendRange.at_level(level) : 0.0;
        spec.intensity_b = spec.touches_bias() ? kSentimentBiasRange.at_level(level) : 0.0;
    }
    return spec;
}

std::string to_string(BreakKind kind) {
    switch (kind) {
        case BreakKind::none: return "none";
        case BreakKind::herding: return "herding";
        case BreakKind::overconfidence: return "overconfidence";
        case BreakKind::sentiment: return "sentiment";
    }
    return "?";
}

std::string to_string(BreakTarget target) {
    switch (target) {
        case BreakTarget::bias_only: return "bias_only";
        case BreakTarget::trend_only: return "trend_only";
        case BreakTarget::both: return "both";
        case BreakTarget::mixed: return "mixed";
    }
    return "?";
}

std::string to_string(Sign sign) { return sign == Sign::positive ? "positive" : "negative"; }

BreakKind parse_break_kind(const std::string& s) {
    if (s == "none") return BreakKind::none;
    if (s == "herding") return BreakKind::herding;
    if (s == "overconfidence") return BreakKind::overconfidence;
    if (s == "sentiment") return BreakKind::sentiment;
    throw InvalidSpec("unknown break kind '" + s + "'");
}

BreakTarget parse_break_target(const std::string& s) {
    if (s == "bias_only") return BreakTarget::bias_only;
    if (s == "trend_only") return BreakTarget::trend_only;
    if (s == "both") return BreakTarget::both;
    if (s == "mixed") return BreakTarget::mixed;
    throw InvalidSpec("unknown break target '" + s + "'");
}

Sign parse_sign(const std::string& s) {
    if (s == "positive") return Sign::positive;
    if (s == "negative") return Sign::negative;
    throw InvalidSpec("unknown sign '" + s + "'");
}

std::vector<Strategy> generate_strategies(const StrategyGenSpec& spec, int H, Rng& rng) {
    if (H < 1) throw InvalidConfig("generate_strategies: H must be >= 1");
    spec.validate();
    std::normal_distribution<double> trend(spec.g_mean, spec.g_sd);
    std::normal_distribution<double> bias(spec.b_mean, spec.b_sd);
    std::vector<Strategy> out(static_cast<std::size_t>(H));
    // Draw for every slot so the forced fundamentalist does not shift the stream.
    for (auto& s : out) {
        s.g = trend(rng);
        s.b = bias(rng);
    }
    if (spec.force_fundamentalist) out.front() = Strategy{0.0, 0.0, out.front().m};
    return out;
}

Strategy apply_overconfidence(const Strategy& s, const BreakSpec& spec) {
    if (spec.kind != BreakKind::overconfidence)
        throw InvalidSpec("apply_overconfidence: break kind is not overconfidence");
    spec.validate();
    Strategy out = s;
    if (spec.touches_trend()) out.g = s.g * (1.0 + spec.intensity_g);
    if (spec.touches_bias()) out.b = s.b * (1.0 + spec.intensity_b);
    return out;
}

StrategyGenSpec apply_sentiment(const StrategyGenSpec& spec, const BreakSpec& brk) {
    if (brk.kind != BreakKind::sentiment)
        throw InvalidSpec("apply_sentiment: break kind is not sentiment");
    brk.validate();
    const double dir = brk.sign == Sign::positive ? 1.0 : -1.0;
    StrategyGenSpec out = spec;
    const double trend_dir = brk.target == BreakTarget::mixed ? -dir : dir;
    if (brk.touches_trend()) out.g_mean += trend_dir * std::abs(brk.intensity_g);
    if (brk.touches_bias()) out.b_mean += dir * std::abs(brk.intensity_b);
    return out;
}

std::vector<Strategy> redraw_under(std::span<const Strategy> strategies, const StrategyGenSpec& from,
                                   const StrategyGenSpec& to) {
    from.validate();
    to.validate();
    std::vector<Strategy> out(strategies.begin(), strategies.end());
    for (std::size_t h = 0; h < out.size(); ++h) {
        if (h == 0 && from.force_fundamentalist) continue;
        out[h].g = to.g_mean + to.g_sd * (strategies[h].g - from.g_mean) / from.g_sd;
        out[h].b = to.b_mean + to.b_sd * (strategies[h].b - from.b_mean) / from.b_sd;
    }
    return out;
}

std::vector<Strategy> apply_herding(std::span<const Strategy> strategies,
                                    const Eigen::Ref<const Eigen::VectorXd>& fitness_prev,
                                    std::size_t herd_index) {
    if (strategies.size() < 2) throw std::invalid_argument("apply_herding: nothing to imitate (H < 2)");
    if (static_cast<std::size_t>(fitness_prev.size()) != strategies.size())
        throw std::invalid_argument("apply_herding: fitness and strategies differ in length");
    if (herd_index >= strategies.size()) throw std::out_of_range("apply_herding: bad herd index");

    std::size_t best = herd_index == 0 ? 1 : 0;
    for (std::size_t h = best + 1; h < strategies.size(); ++h) {
        if (h == herd_index) continue;
        if (fitness_prev[static_cast<Eigen::Index>(h)] > fitness_prev[static_cast<Eigen::Index>(best)])
            best = h;
    }
    std::vector<Strategy> out(strategies.begin(), strategies.end());
    out[herd_index].g = strategies[best].g;
    out[herd_index].b = strategies[best].b;
    return out;
}

}  // namespace ham
