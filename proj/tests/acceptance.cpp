// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Monte Carlo criteria use the shipped defaults (100 runs, beta = 300, level 1)
// with master seed 42 and permutation seed 7, the same seeds as configs/paper13.json.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ham/aggregate.hpp"
#include "ham/config.hpp"
#include "ham/core.hpp"
#include "ham/empirical.hpp"
#include "ham/montecarlo.hpp"
#include "ham/stats.hpp"
#include "oracles.hpp"

using namespace ham;

namespace {

constexpr std::uint64_t kMasterSeed = 42;
constexpr std::uint64_t kPermSeed = 7;

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::printf("%s  %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

int worker_threads() {
    return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 4u));
}

stats::StatReport run_setup(const std::string& setup, std::uint64_t seed = kMasterSeed) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.threads = worker_threads();
    cfg.breaks = parse_setup(setup, 1.0).breaks;
    const RunSamples batch = run_batch(cfg);
    return stats::aggregate(batch, {999, kPermSeed, cfg.threads, false}, setup);
}

std::string counts(const stats::StatReport& r) {
    std::ostringstream ss;
    ss << "mean_up=" << r.mean_up << " var_up=" << r.var_up << " skew_up=" << r.skew_up
       << " kurt_down=" << r.kurt_down << " dVar%=" << r.var_delta_pct << " dKurt%=" << r.kurt_delta_pct
       << " CvM(B-b,b-a,a-A,A-B)=" << r.cvm_nonreject[0] << "/" << r.cvm_nonreject[1] << "/" << r.cvm_nonreject[2]
       << "/" << r.cvm_nonreject[3];
    return ss.str();
}

bool within(int v, int lo, int hi) { return v >= lo && v <= hi; }

void baseline() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_setup("none");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool cvm = std::all_of(r.cvm_nonreject.begin(), r.cvm_nonreject.end(), [](int c) { return c >= 95; });
    const bool shifts = within(r.mean_up, 35, 65) && within(r.var_up, 35, 65) && within(r.skew_up, 35, 65) &&
                        within(r.kurt_down, 35, 65);
    std::ostringstream d;
    d << counts(r) << " runtime=" << secs << "s on " << worker_threads() << " thread(s)";
    report(cvm && shifts && secs <= 60.0, "baseline calibration", d.str());
}

void sentiment_signature() {
    const auto r = run_setup("sentiment+bias");
    report(r.mean_up >= 95 && r.cvm_nonreject[3] <= 5, "sentiment signature (bias, shift 0.3)", counts(r));
}

void overconfidence_signature() {
    const auto bias = run_setup("overconfidence+bias");
    report(bias.var_up >= 90, "overconfidence signature (bias, scale 0.5)", counts(bias));

    bool ok = true;
    std::ostringstream d;
    for (std::uint64_t seed : {kMasterSeed, std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3}, std::uint64_t{4}}) {
        const auto r = run_setup("overconfidence+trend", seed);
        const int kurt = r.kurt_down;
        const int ab = r.cvm_nonreject[3];
        ok = ok && kurt <= 20 && std::abs(kurt - 8) <= 20 && ab >= 40 && std::abs(ab - 58) <= 20;
        d << "seed " << seed << ": kurt_down=" << kurt << " A-B=" << ab << "; ";
    }
    report(ok, "overconfidence signature (trend, scale 0.5, 5 seeds)", d.str());
}

void herding_signature() {
    const auto r = run_setup("herding");
    report(within(r.cvm_nonreject[1], 40, 80) && r.cvm_nonreject[3] <= 15, "herding signature", counts(r));
}

void mixed_sentiment() {
    const auto r = run_setup("sentiment+mix");
    report(r.var_delta_pct < 0.0 && r.kurt_down >= 55, "mixed-sentiment inversion", counts(r));
}

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

void test_sizes() {
    constexpr int kReps = 200;
    int welch = 0;
    int f = 0;
    int jb = 0;
    int cvm = 0;
    for (int rep = 0; rep < kReps; ++rep) {
        const auto s = static_cast<std::uint64_t>(rep);
        const auto x = normal_sample(100, derive_seed(101, s));
        const auto y = normal_sample(100, derive_seed(202, s));
        welch += stats::mean_difference_test(x, y).rejected_at_5pct;
        f += stats::variance_ratio_test(x, y).rejected_at_5pct;
        jb += stats::jarque_bera(normal_sample(500, derive_seed(303, s))).rejected_at_5pct;
        cvm += stats::cramer_von_mises_2s(normal_sample(50, derive_seed(404, s)), normal_sample(50, derive_seed(505, s)),
                                          999, derive_seed(606, s))
                   .rejected_at_5pct;
    }
    const auto ok = [](int c) { return c >= 4 && c <= 18; };  // 2% and 9% of 200
    std::ostringstream d;
    d << "rejections of 200: Welch t=" << welch << " F=" << f << " JB=" << jb << " CvM=" << cvm;
    report(ok(welch) && ok(f) && ok(jb) && ok(cvm), "test sizes", d.str());
}

void oracle_equivalence() {
    std::mt19937_64 sizes(2718);
    std::uniform_int_distribution<int> len(3, 8);
    double worst = 0.0;
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
        auto x = normal_sample(static_cast<std::size_t>(len(sizes)), derive_seed(7000, inst));
        auto y = normal_sample(static_cast<std::size_t>(len(sizes)), derive_seed(8000, inst));
        for (auto& v : y) v += 0.15 * static_cast<double>(inst % 8);
        if (inst % 5 == 0)
            for (auto& v : x) v = std::round(v);
        const double exact = oracle::cvm_exact_p(x, y);
        const double perm = stats::cramer_von_mises_2s(x, y, 9999, derive_seed(9000, inst)).p_value;
        worst = std::max(worst, std::abs(exact - perm));
    }
    report(worst <= 0.02, "CvM oracle equivalence", "max |p_perm - p_exact| over 20 instances = " + std::to_string(worst));
}

void invariants() {
    std::vector<std::string> broken;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01(0.0, 1.0);

    for (int rep = 0; rep < 1000; ++rep) {
        Eigen::VectorXd u(5);
        for (int h = 0; h < 5; ++h) u[h] = n01(rng);
        const double beta = 500.0 * std::abs(n01(rng));
        const Eigen::VectorXd p = update_fractions(u, beta);
        if (std::abs(p.sum() - 1.0) > 1e-12 || (p.array() < 0.0).any()) broken.push_back("softmax normalization");
        const Eigen::VectorXd shifted = update_fractions((u.array() + 8.0).matrix(), beta);
        if ((shifted - p).cwiseAbs().maxCoeff() > 1e-12) broken.push_back("softmax shift invariance");
    }

    MarketConfig market;
    const std::vector<Strategy> fundamentalists(5, Strategy{0.0, 0.0});
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
    if (step_deviation(uniform, fundamentalists, 0.0, 0.0, market) != 0.0) broken.push_back("fundamentalist fixed point");
    {
        MarketState state = MarketState::initial(5);
        for (int t = 0; t < 200; ++t)
            if (advance(state, fundamentalists, 0.0, market) != 0.0) {
                broken.push_back("fundamentalist fixed point (trajectory)");
                break;
            }
    }

    for (int rep = 0; rep < 200; ++rep) {
        const std::vector<double> x{n01(rng), n01(rng), n01(rng)};
        const Strategy s{0.4 * n01(rng), 0.3 * n01(rng), 1};
        if (fitness_memory(x, s, market) != fitness_one_lag(x[2], x[1], x[0], s, market))
            broken.push_back("memory m=1 degeneracy");
    }

    RunConfig cfg;
    cfg.n_runs = 16;
    cfg.seed = 5;
    cfg.breaks = parse_setup("sentiment+mix,herding,overconfidence", 1.0).breaks;
    cfg.extensions.memory = true;
    cfg.threads = 1;
    const auto one = run_batch(cfg);
    cfg.threads = 4;
    const auto four = run_batch(cfg);
    if (one.B != four.B || one.b != four.b || one.a != four.a || one.A != four.A)
        broken.push_back("determinism across thread counts");
    const auto r1 = stats::aggregate(one, {199, 3, 1, false});
    const auto r4 = stats::aggregate(one, {199, 3, 4, false});
    if (r1.row() != r4.row()) broken.push_back("aggregation determinism across thread counts");

    std::sort(broken.begin(), broken.end());
    broken.erase(std::unique(broken.begin(), broken.end()), broken.end());
    std::string detail = "softmax, fundamentalist fixed point, memory m=1, thread determinism";
    if (!broken.empty()) {
        detail = "violated:";
        for (const auto& b : broken) detail += " [" + b + "]";
    }
    report(broken.empty(), "invariant suites", detail);
}

bool close3(double v, double ref) { return std::abs(v - ref) <= 5e-4 + 1e-12; }

void empirical_path() {
    const char* csv = std::getenv("HAMBREAK_DJIA_CSV");
    if (csv != nullptr && *csv != '\0') {
        const char* ev_env = std::getenv("HAMBREAK_DJIA_EVENTS");
        const std::string events_path = ev_env != nullptr && *ev_env != '\0' ? ev_env : HAM_SOURCE_DIR "/data/djia_events.json";
        try {
            const auto data = empirical::load_prices(csv);
            const auto events = empirical::load_events(events_path);
            const auto it = std::find_if(events.begin(), events.end(),
                                         [](const empirical::EventSpec& e) { return e.name.find("Black Monday") != std::string::npos; });
            if (it == events.end()) throw std::runtime_error("no Black Monday event in " + events_path);
            const auto split = empirical::window_split(data, *it);
            const auto b = stats::moments(split.before);
            const bool ok = close3(b.mean, -0.181) && close3(b.variance, 0.762) && close3(b.skewness, -6.689) &&
                            close3(b.kurtosis, 72.130) && b.min == -11.25 && b.max == 2.50 && b.n == 460 &&
                            split.after.size() == 460;
            std::ostringstream d;
            d << "B: n=" << b.n << " mean=" << b.mean << " var=" << b.variance << " skew=" << b.skewness
              << " kurt=" << b.kurtosis << " min=" << b.min << " max=" << b.max << "; A: n=" << split.after.size();
            report(ok, "empirical path (DJIA Black Monday before window)", d.str());
        } catch (const std::exception& e) {
            report(false, "empirical path (DJIA Black Monday before window)", e.what());
        }
        return;
    }
    try {
        const auto data = empirical::load_prices(HAM_FIXTURE_DIR "/five_events_prices.csv");
        const auto events = empirical::load_events(HAM_FIXTURE_DIR "/five_events.json");
        const auto r = empirical::empirical_report(events, data);
        int up = 0;
        for (const auto& e : r.events) up += e.after.mean > e.before.mean;
        const auto label = r.summary[0].label();
        const bool ok = r.events.size() == 5 && up == 4 && r.summary[0].majority == 1 && r.summary[0].count() == 4 &&
                        label.rfind("4/5 ↑", 0) == 0;
        report(ok, "empirical path (synthetic five-event fixture; set HAMBREAK_DJIA_CSV for DJIA data)",
               "mean tally " + label + ", direct count " + std::to_string(up) + "/5");
    } catch (const std::exception& e) {
        report(false, "empirical path (synthetic five-event fixture)", e.what());
    }
}

}  // namespace

int main() {
    baseline();
    sentiment_signature();
    overconfidence_signature();
    herding_signature();
    mixed_sentiment();
    test_sizes();
    oracle_equivalence();
    invariants();
    empirical_path();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
