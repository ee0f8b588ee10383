#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ham/errors.hpp"
#include "ham/montecarlo.hpp"

using namespace ham;

namespace {

RunConfig small_config(int n_runs = 10) {
    RunConfig cfg;
    cfg.n_runs = n_runs;
    cfg.seed = 42;
    return cfg;
}

BreakSpec sentiment_bias() {
    return BreakSpec::at_level(BreakKind::sentiment, BreakTarget::bias_only, Sign::positive, 1.0);
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("sample split sizes") {
    RunConfig cfg = small_config(100);
    const auto batch = run_batch(cfg);
    CHECK(batch.B.size() == 10000);
    CHECK(batch.b.size() == 2000);
    CHECK(batch.a.size() == 2000);
    CHECK(batch.A.size() == 10000);
    for (const auto& run : batch.runs) {
        CHECK(run.parts.B.size() == 100);
        CHECK(run.parts.b.size() == 20);
        CHECK(run.parts.a.size() == 20);
        CHECK(run.parts.A.size() == 100);
    }
}

TEST_CASE("split positions") {
    RunConfig cfg;
    std::vector<double> series(static_cast<std::size_t>(cfg.T));
    std::iota(series.begin(), series.end(), 1.0);  // value == period
    const auto parts = split_samples(series, cfg);
    CHECK(parts.B.front() == 26.0);
    CHECK(parts.B.back() == 125.0);
    CHECK(parts.A.front() == 126.0);
    CHECK(parts.A.back() == 225.0);
    CHECK(parts.b.front() == 106.0);
    CHECK(parts.b.back() == 125.0);
    CHECK(parts.a.front() == 126.0);
    CHECK(parts.a.back() == 145.0);

    cfg.window = 0;
    const auto empty = split_samples(series, cfg);
    CHECK(empty.b.empty());
    CHECK(empty.a.empty());
    CHECK(empty.B.size() == 100);

    CHECK_THROWS((void)split_samples(std::vector<double>(10, 0.0), cfg));
}

TEST_CASE("determinism and thread independence") {
    RunConfig cfg = small_config(12);
    cfg.breaks = {sentiment_bias(), BreakSpec{BreakKind::herding}};
    const auto one = run_batch(cfg);
    cfg.threads = 4;
    const auto four = run_batch(cfg);
    CHECK(one.B == four.B);
    CHECK(one.b == four.b);
    CHECK(one.a == four.a);
    CHECK(one.A == four.A);
    for (std::size_t i = 0; i < one.runs.size(); ++i) CHECK(one.runs[i].seed == four.runs[i].seed);

    CHECK(simulate_run(cfg, 5) == simulate_run(cfg, 5));
    CHECK(simulate_run(cfg, 5) != simulate_run(cfg, 6));
}

TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(run_seed(42, i));
    CHECK(seen.size() == 1000);
}

TEST_CASE("break locality") {
    RunConfig plain = small_config();
    RunConfig none = plain;
    none.breaks = {BreakSpec{BreakKind::none}};
    CHECK(simulate_run(plain, 11) == simulate_run(none, 11));

    for (const auto& brk : {sentiment_bias(), BreakSpec{BreakKind::herding},
                            BreakSpec::at_level(BreakKind::overconfidence, BreakTarget::both, Sign::positive, 1.0)}) {
        RunConfig broken = plain;
        broken.breaks = {brk};
        const auto a = simulate_run(plain, 11);
        const auto b = simulate_run(broken, 11);
        const auto cut = static_cast<std::ptrdiff_t>(plain.bpd - 1);
        CHECK(std::equal(a.begin(), a.begin() + cut, b.begin()));
        CHECK(a != b);
    }
}

TEST_CASE("fundamentalist-only market without noise stays at zero") {
    RunConfig cfg = small_config(1);
    cfg.market.noise_halfwidth = 0.0;
    cfg.market.H = 1;
    cfg.gen.force_fundamentalist = true;
    const auto x = simulate_run(cfg, 3);
    CHECK(std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("trace records the broken population") {
    RunConfig cfg = small_config(1);
    cfg.breaks = {BreakSpec::at_level(BreakKind::overconfidence, BreakTarget::bias_only, Sign::positive, 1.0)};
    const auto tr = simulate_run_trace(cfg, 9);
    REQUIRE(tr.strategies_before.size() == 5);
    for (std::size_t h = 0; h < 5; ++h) {
        CHECK(tr.strategies_after[h].g == tr.strategies_before[h].g);
        CHECK(tr.strategies_after[h].b == doctest::Approx(1.5 * tr.strategies_before[h].b));
    }
    CHECK(tr.beta == cfg.market.beta);
}

TEST_CASE("sweep cells") {
    RunConfig base = small_config(2);
    const auto betas = default_beta_grid();
    const auto levels = default_intensity_levels();
    CHECK(betas.size() == 10);
    CHECK(betas.front() == 5.0);
    CHECK(betas.back() == 500.0);
    CHECK(levels.size() == 10);

    CHECK(sweep_cells(base, betas, levels).size() == 10);
    base.breaks = {sentiment_bias()};
    const auto cells = sweep_cells(base, betas, levels);
    CHECK(cells.size() == 100);
    std::set<std::uint64_t> seeds;
    for (const auto& c : cells) {
        seeds.insert(c.cfg.seed);
        CHECK(c.cfg.market.beta == c.beta);
        CHECK(c.cfg.breaks.front().intensity_b == doctest::Approx(0.3 * c.level));
    }
    CHECK(seeds.size() == 100);

    base.extensions.stochastic_params = true;
    const auto stoch = sweep_cells(base, betas, levels);
    REQUIRE(stoch.size() == 1);
    CHECK(stoch.front().stochastic);
    CHECK_THROWS_AS((void)sweep_cells(base, {}, levels), InvalidConfig);
}

TEST_CASE("stochastic parameters stay in range") {
    RunConfig cfg = small_config(20);
    cfg.extensions.stochastic_params = true;
    cfg.breaks = {BreakSpec::at_level(BreakKind::sentiment, BreakTarget::mixed, Sign::negative, 1.0)};
    const auto batch = run_batch(cfg);
    std::set<double> betas;
    for (const auto& r : batch.runs) {
        CHECK(r.beta >= kStochasticBetaLo);
        CHECK(r.beta <= kStochasticBetaHi);
        betas.insert(r.beta);
        REQUIRE(r.breaks.size() == 1);
        CHECK_NOTHROW(r.breaks.front().validate());
    }
    CHECK(betas.size() == 20);
}

TEST_CASE("memory lengths") {
    Rng rng(17);
    std::map<int, int> counts;
    constexpr int kDraws = 21000;
    for (int i = 0; i < kDraws / 7; ++i)
        for (int m : memory_lengths(7, rng)) ++counts[m];
    CHECK(counts.begin()->first == 1);
    CHECK(counts.rbegin()->first == kMaxMemory);
    // 0 folds into 1, so 1 carries two of the 21 cells
    CHECK(std::abs(counts[1] - 2000) < 250);
    for (int m = 2; m <= kMaxMemory; ++m) CHECK(std::abs(counts[m] - 1000) < 180);

    RunConfig cfg = small_config(3);
    cfg.extensions.memory = true;
    const auto batch = run_batch(cfg);
    for (const auto& r : batch.runs) CHECK(r.memory.size() == 5);
}

TEST_CASE("configuration errors") {
    RunConfig cfg = small_config();
    auto expect_invalid = [](RunConfig c) { CHECK_THROWS_AS(c.validate(), std::invalid_argument); };
    {
        RunConfig c = cfg;
        c.bpd = 1;
        expect_invalid(c);
    }
    {
        RunConfig c = cfg;
        c.bpd = cfg.T;
        expect_invalid(c);
    }
    {
        RunConfig c = cfg;
        c.window = 150;
        expect_invalid(c);
    }
    {
        RunConfig c = cfg;
        c.n_runs = 0;
        expect_invalid(c);
    }
    {
        RunConfig c = cfg;
        c.burn_frac = 0.6;
        expect_invalid(c);
    }
    {
        RunConfig c = cfg;
        c.breaks = {sentiment_bias(), sentiment_bias()};
        expect_invalid(c);
    }
    {
        RunConfig c = cfg;
        c.market.H = 1;
        c.breaks = {BreakSpec{BreakKind::herding}};
        expect_invalid(c);
    }
    {
        RunConfig c = cfg;
        c.market.beta = -1.0;
        expect_invalid(c);
    }
    CHECK_NOTHROW(cfg.validate());
}

}
