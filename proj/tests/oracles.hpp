#pragma once

// Slow, direct reimplementations used to cross-check the library.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

// Two-sample CvM statistic straight from the definition: empirical CDFs of
// both samples evaluated at every pooled point, no sorting tricks.
inline double cvm_statistic(const std::vector<double>& x, const std::vector<double>& y) {
    const double N = static_cast<double>(x.size());
    const double M = static_cast<double>(y.size());
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    double sum = 0.0;
    for (double z : pooled) {
        const double fx = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v <= z; })) / N;
        const double fy = static_cast<double>(std::count_if(y.begin(), y.end(), [&](double v) { return v <= z; })) / M;
        sum += (fx - fy) * (fx - fy);
    }
    return N * M / ((N + M) * (N + M)) * sum;
}

// Exact permutation p-value: every way of choosing which pooled positions
// form the first sample, each equally likely under the null.
inline double cvm_exact_p(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::size_t n = pooled.size();
    const double observed = cvm_statistic(x, y);
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(x.size()), true);
    long total = 0;
    long at_least = 0;
    do {
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < n; ++i) (pick[i] ? a : b).push_back(pooled[i]);
        ++total;
        if (cvm_statistic(a, b) >= observed - 1e-12) ++at_least;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace oracle
