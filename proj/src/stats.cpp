#include "ham/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ham/errors.hpp"

namespace ham::stats {

namespace {

Eigen::Map<const Eigen::ArrayXd> as_array(std::span<const double> s) {
    return {s.data(), static_cast<Eigen::Index>(s.size())};
}

void require_size(std::span<const double> s, std::size_t n, const char* who) {
    if (s.size() < n) {
        throw InsufficientSample(std::string(who) + ": need at least " + std::to_string(n) +
                                 " observations, got " + std::to_string(s.size()));
    }
}

double clamp_p(double p) { return std::clamp(p, 0.0, 1.0); }

// Sorted pooled sample with a 0/1 label per position and the end index of each tie group.
struct Pooled {
    std::vector<unsigned char> labels;
    std::vector<std::size_t> group_ends;
    std::size_t n_x = 0;
    std::size_t n_y = 0;
};

Pooled pool(std::span<const double> x, std::span<const double> y) {
    std::vector<std::pair<double, unsigned char>> all;
    all.reserve(x.size() + y.size());
    for (double v : x) all.emplace_back(v, 0);
    for (double v : y) all.emplace_back(v, 1);
    std::sort(all.begin(), all.end());
    Pooled p;
    p.n_x = x.size();
    p.n_y = y.size();
    p.labels.reserve(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        p.labels.push_back(all[i].second);
        if (i + 1 == all.size() || all[i + 1].first != all[i].first) p.group_ends.push_back(i + 1);
    }
    return p;
}

double statistic_from_labels(const std::vector<unsigned char>& labels,
                             const std::vector<std::size_t>& group_ends, std::size_t n_x,
                             std::size_t n_y) {
    // T = sum_k mult_k (c_x M - c_y N)^2 / (N M (N + M)^2); the sum is integral.
    const auto N = static_cast<long double>(n_x);
    const auto M = static_cast<long double>(n_y);
    long double sum = 0.0L;
    std::size_t cx = 0;
    std::size_t cy = 0;
    std::size_t pos = 0;
    for (std::size_t end : group_ends) {
        const std::size_t start = pos;
        for (; pos < end; ++pos) {
            if (labels[pos] == 0)
                ++cx;
            else
                ++cy;
        }
        const long double d = static_cast<long double>(cx) * M - static_cast<long double>(cy) * N;
        sum += static_cast<long double>(end - start) * d * d;
    }
    return static_cast<double>(sum / (N * M * (N + M) * (N + M)));
}

}  // namespace

TestResult make_result(double statistic, double p_value) noexcept {
    return TestResult{statistic, p_value, p_value < kAlpha};
}

int significance_stars(double p_value) noexcept {
    if (p_value < 0.01) return 3;
    if (p_value < 0.05) return 2;
    if (p_value < 0.10) return 1;
    return 0;
}

MeanVar mean_var(std::span<const double> sample) {
    require_size(sample, 2, "mean_var");
    const auto a = as_array(sample);
    MeanVar out;
    out.n = sample.size();
    out.mean = a.mean();
    out.variance = (a - out.mean).square().sum() / static_cast<double>(out.n - 1);
    return out;
}

MomentSummary moments(std::span<const double> sample) {
    require_size(sample, 4, "moments");
    const auto a = as_array(sample);
    MomentSummary out;
    out.n = sample.size();
    out.min = a.minCoeff();
    out.max = a.maxCoeff();
    out.mean = a.mean();
    if (out.min == out.max) throw DegenerateSample("moments: zero-variance sample");

    const Eigen::ArrayXd d = a - out.mean;
    const Eigen::ArrayXd d2 = d.square();
    const double n = static_cast<double>(out.n);
    const double m2 = d2.sum() / n;
    const double m3 = (d2 * d).sum() / n;
    const double m4 = d2.square().sum() / n;
    if (!(m2 > 0.0)) throw DegenerateSample("moments: zero-variance sample");

    out.variance = m2 * n / (n - 1.0);
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
    return out;
}

TestResult jarque_bera(std::span<const double> sample) {
    require_size(sample, 8, "jarque_bera");
    const MomentSummary m = moments(sample);
    const double excess = m.kurtosis - 3.0;
    const double jb = static_cast<double>(m.n) / 6.0 *
                      (m.skewness * m.skewness + excess * excess / 4.0);
    // chi-square with 2 degrees of freedom: survival function exp(-x/2)
    return make_result(jb, clamp_p(std::exp(-jb / 2.0)));
}

double cramer_von_mises_statistic(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw InsufficientSample("cramer_von_mises: empty sample");
    const Pooled p = pool(x, y);
    return statistic_from_labels(p.labels, p.group_ends, p.n_x, p.n_y);
}

TestResult cramer_von_mises_2s(std::span<const double> x, std::span<const double> y, int n_perm,
                               std::uint64_t perm_seed) {
    if (x.empty() || y.empty()) throw InsufficientSample("cramer_von_mises: empty sample");
    require_size(x, 2, "cramer_von_mises");
    require_size(y, 2, "cramer_von_mises");
    if (n_perm < 99) throw std::invalid_argument("cramer_von_mises: n_perm must be >= 99");

    Pooled p = pool(x, y);
    const double observed = statistic_from_labels(p.labels, p.group_ends, p.n_x, p.n_y);
    const double threshold = observed - 1e-12 * std::max(observed, 1e-12);

    std::mt19937_64 rng(perm_seed);
    std::vector<unsigned char> labels = p.labels;
    long exceed = 0;
    for (int k = 0; k < n_perm; ++k) {
        std::shuffle(labels.begin(), labels.end(), rng);
        if (statistic_from_labels(labels, p.group_ends, p.n_x, p.n_y) >= threshold) ++exceed;
    }
    const double pv = static_cast<double>(1 + exceed) / static_cast<double>(n_perm + 1);
    return make_result(observed, clamp_p(pv));
}

TestResult mean_difference_test(std::span<const double> x, std::span<const double> y) {
    const MeanVar mx = mean_var(x);
    const MeanVar my = mean_var(y);
    const double sx = mx.variance / static_cast<double>(mx.n);
    const double sy = my.variance / static_cast<double>(my.n);
    const double diff = mx.mean - my.mean;
    const double se2 = sx + sy;
    if (!(se2 > 0.0)) {
        if (diff == 0.0) return make_result(0.0, 1.0);
        return make_result(std::copysign(std::numeric_limits<double>::infinity(), diff), 0.0);
    }
    const double t = diff / std::sqrt(se2);
    const double df = se2 * se2 /
                      (sx * sx / static_cast<double>(mx.n - 1) + sy * sy / static_cast<double>(my.n - 1));
    const boost::math::students_t_distribution<double> dist(df);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return make_result(t, clamp_p(p));
}

TestResult variance_ratio_test(std::span<const double> x, std::span<const double> y) {
    const MeanVar mx = mean_var(x);
    const MeanVar my = mean_var(y);
    if (!(mx.variance > 0.0) || !(my.variance > 0.0))
        throw DegenerateSample("variance_ratio_test: zero-variance sample");
    const double f = mx.variance / my.variance;
    const boost::math::fisher_f_distribution<double> dist(static_cast<double>(mx.n - 1),
                                                          static_cast<double>(my.n - 1));
    const double lower = boost::math::cdf(dist, f);
    const double upper = boost::math::cdf(boost::math::complement(dist, f));
    return make_result(f, clamp_p(2.0 * std::min(lower, upper)));
}

}  // namespace ham::stats
