#include "ham/aggregate.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "ham/parallel.hpp"

namespace ham::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunOutcome {
    std::optional<bool> mean_up;
    std::optional<bool> var_up;
    std::optional<bool> skew_up;
    std::optional<bool> kurt_down;
    double var_delta = kNaN;
    double kurt_delta = kNaN;
    std::array<std::optional<bool>, 4> cvm_reject;
    std::array<std::optional<bool>, 4> jb_reject;
    bool flagged = false;
};

template <typename Fn>
auto try_test(Fn&& fn) -> std::optional<TestResult> {
    try {
        return fn();
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<MomentSummary> try_moments(std::span<const double> s) {
    try {
        return moments(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

double pct_change(double before, double after) {
    if (!(std::abs(before) > 0.0)) return kNaN;
    return 100.0 * (after - before) / std::abs(before);
}

RunOutcome evaluate_run(const RunRecord& run, const AggregateOptions& opts) {
    const RunParts& p = run.parts;
    RunOutcome out;

    if (p.B.size() >= 2 && p.A.size() >= 2) {
        const MeanVar before = mean_var(p.B);
        const MeanVar after = mean_var(p.A);
        out.mean_up = after.mean > before.mean;
        out.var_up = after.variance > before.variance;
        out.var_delta = pct_change(before.variance, after.variance);
    }
    const auto mb = try_moments(p.B);
    const auto ma = try_moments(p.A);
    if (mb && ma) {
        out.skew_up = ma->skewness > mb->skewness;
        out.kurt_down = ma->kurtosis < mb->kurtosis;
        out.kurt_delta = pct_change(mb->kurtosis, ma->kurtosis);
    }

    const std::array<std::pair<const std::vector<double>*, const std::vector<double>*>, 4> pairs{{
        {&p.B, &p.b}, {&p.b, &p.a}, {&p.a, &p.A}, {&p.A, &p.B},
    }};
    for (int k = 0; k < 4; ++k) {
        const auto [x, y] = pairs[static_cast<std::size_t>(k)];
        const auto r = try_test([&] {
            return cramer_von_mises_2s(*x, *y, opts.n_perm, test_seed(opts.perm_seed, run.run_id, k));
        });
        if (r) out.cvm_reject[static_cast<std::size_t>(k)] = r->rejected_at_5pct;
    }
    const std::array<const std::vector<double>*, 4> samples{&p.B, &p.b, &p.a, &p.A};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto r = try_test([&] { return jarque_bera(*samples[k]); });
        if (r) out.jb_reject[k] = r->rejected_at_5pct;
    }

    out.flagged = !out.mean_up || !out.skew_up || std::isnan(out.var_delta) ||
                  std::isnan(out.kurt_delta);
    for (std::size_t k = 0; k < 4; ++k)
        out.flagged = out.flagged || !out.cvm_reject[k] || !out.jb_reject[k];
    return out;
}

double mean_of_defined(const std::vector<double>& v) {
    double sum = 0.0;
    int n = 0;
    for (double d : v) {
        if (std::isnan(d)) continue;
        sum += d;
        ++n;
    }
    return n > 0 ? sum / n : kNaN;
}

PooledTests pooled_tests(const RunSamples& batch, const AggregateOptions& opts) {
    PooledTests out;
    const std::array<std::pair<const std::vector<double>*, const std::vector<double>*>, 4> pairs{{
        {&batch.B, &batch.b}, {&batch.b, &batch.a}, {&batch.a, &batch.A}, {&batch.A, &batch.B},
    }};
    for (int k = 0; k < 4; ++k) {
        const auto [x, y] = pairs[static_cast<std::size_t>(k)];
        out.cvm[static_cast<std::size_t>(k)] = try_test([&] {
            return cramer_von_mises_2s(*x, *y, opts.n_perm, test_seed(opts.perm_seed, -1, k));
        });
    }
    const std::array<const std::vector<double>*, 4> samples{&batch.B, &batch.b, &batch.a, &batch.A};
    for (std::size_t k = 0; k < 4; ++k) out.jb[k] = try_test([&] { return jarque_bera(*samples[k]); });
    return out;
}

}  // namespace

std::array<double, 14> StatReport::row() const {
    return {static_cast<double>(mean_up),        static_cast<double>(var_up),
            var_delta_pct,                       static_cast<double>(skew_up),
            static_cast<double>(kurt_down),      kurt_delta_pct,
            static_cast<double>(cvm_nonreject[0]), static_cast<double>(cvm_nonreject[1]),
            static_cast<double>(cvm_nonreject[2]), static_cast<double>(cvm_nonreject[3]),
            static_cast<double>(jb_nonreject[0]),  static_cast<double>(jb_nonreject[1]),
            static_cast<double>(jb_nonreject[2]),  static_cast<double>(jb_nonreject[3])};
}

std::uint64_t test_seed(std::uint64_t perm_seed, int run_id, int slot) noexcept {
    return derive_seed(derive_seed(perm_seed, static_cast<std::uint64_t>(run_id + 1)),
                       static_cast<std::uint64_t>(slot));
}

StatReport aggregate(const RunSamples& batch, const AggregateOptions& opts, std::string label) {
    const std::size_t n = batch.runs.size();
    std::vector<RunOutcome> outcomes(n);
    parallel_for(n, opts.threads, [&](std::size_t i) { outcomes[i] = evaluate_run(batch.runs[i], opts); });

    StatReport r;
    r.label = std::move(label);
    r.n_runs = static_cast<int>(n);
    std::vector<double> var_deltas;
    std::vector<double> kurt_deltas;
    for (std::size_t i = 0; i < n; ++i) {
        const RunOutcome& o = outcomes[i];
        r.mean_up += o.mean_up.value_or(false) ? 1 : 0;
        r.var_up += o.var_up.value_or(false) ? 1 : 0;
        if (o.skew_up) {
            ++r.n_shape_runs;
            r.skew_up += *o.skew_up ? 1 : 0;
            r.kurt_down += *o.kurt_down ? 1 : 0;
        }
        var_deltas.push_back(o.var_delta);
        kurt_deltas.push_back(o.kurt_delta);
        for (std::size_t k = 0; k < 4; ++k) {
            if (o.cvm_reject[k]) {
                ++r.cvm_applicable[k];
                r.cvm_nonreject[k] += *o.cvm_reject[k] ? 0 : 1;
            }
            if (o.jb_reject[k]) {
                ++r.jb_applicable[k];
                r.jb_nonreject[k] += *o.jb_reject[k] ? 0 : 1;
            }
        }
        if (o.flagged) r.flagged_runs.push_back(batch.runs[i].run_id);
    }
    r.var_delta_pct = mean_of_defined(var_deltas);
    r.kurt_delta_pct = mean_of_defined(kurt_deltas);
    if (opts.pooled_tests) r.pooled = pooled_tests(batch, opts);
    return r;
}

}  // namespace ham::stats
