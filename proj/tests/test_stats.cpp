#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nclab/stats.hpp"

using namespace nclab;

// Per-seed feature-norm thresholds reported for the two residual-network
// cells of the grid; the repo's fixtures carry the same numbers.
static const std::vector<double> kFnStarA{5.858, 5.905, 5.837};
static const std::vector<double> kFnStarB{1.521, 1.517, 1.506};

TEST_CASE("summarize reproduces the published per-seed summaries") {
    const auto a = summarize(kFnStarA);
    CHECK(a.mean == doctest::Approx(5.867).epsilon(0.001 / 5.867));
    CHECK(a.std == doctest::Approx(0.034).epsilon(0.03));
    CHECK(a.cv * 100.0 == doctest::Approx(0.6).epsilon(0.1 / 0.6));

    const auto b = summarize(kFnStarB);
    CHECK(b.mean == doctest::Approx(1.515).epsilon(0.001));
    CHECK(b.std == doctest::Approx(0.007).epsilon(0.15));
    CHECK(b.cv * 100.0 == doctest::Approx(0.5).epsilon(0.2));

    const std::vector<double> constant{2.0, 2.0, 2.0};
    const auto c = summarize(constant);
    CHECK(c.std == 0.0);
    CHECK(c.cv == 0.0);
}

TEST_CASE("t confidence intervals reproduce the published intervals") {
    const auto ci_a = t_ci(kFnStarA, 0.95);
    CHECK(std::fabs(ci_a.lo - 5.781) < 0.002);
    CHECK(std::fabs(ci_a.hi - 5.952) < 0.002);

    const auto ci_b = t_ci(kFnStarB, 0.95);
    CHECK(std::fabs(ci_b.lo - 1.494) < 0.002);
    CHECK(std::fabs(ci_b.hi - 1.535) < 0.002);

    const std::vector<double> equal{3.0, 3.0};
    const auto degenerate = t_ci(equal, 0.95);
    CHECK(degenerate.lo == 3.0);
    CHECK(degenerate.hi == 3.0);
}

TEST_CASE("bootstrap percentile interval") {
    const std::vector<double> constant{4.0, 4.0, 4.0, 4.0};
    RngState rng(1);
    const auto ci = bootstrap_ci(constant, rng, 2000, 0.95);
    CHECK(ci.lo == 4.0);
    CHECK(ci.hi == 4.0);

    std::vector<double> xs;
    for (int rep = 0; rep < 7; ++rep) {
        xs.insert(xs.end(), {1.0, 1.1, 0.9});
    }
    RngState r2(77);
    const auto interval = bootstrap_ci(xs, r2, 10000, 0.95);
    const double mean = mean_of(xs);
    CHECK(interval.lo <= mean);
    CHECK(interval.hi >= mean);

    // Independent resampler sharing the RNG stream and quantile convention.
    RngState r3(77);
    std::vector<double> means(10000);
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            s += xs[r3.next_below(xs.size())];
        }
        m = s / static_cast<double>(xs.size());
    }
    std::sort(means.begin(), means.end());
    auto quant = [&](double q) {
        const double pos = q * static_cast<double>(means.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = static_cast<std::size_t>(std::ceil(pos));
        return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
    };
    CHECK(interval.lo == doctest::Approx(quant(0.025)).epsilon(1e-12));
    CHECK(interval.hi == doctest::Approx(quant(0.975)).epsilon(1e-12));

    // Same seed is bitwise reproducible; wider level widens the interval.
    RngState r4(77), r5(77);
    const auto i1 = bootstrap_ci(xs, r4, 5000, 0.95);
    const auto i2 = bootstrap_ci(xs, r5, 5000, 0.95);
    CHECK(i1.lo == i2.lo);
    CHECK(i1.hi == i2.hi);
    RngState r6(77);
    const auto wider = bootstrap_ci(xs, r6, 5000, 0.99);
    CHECK(wider.lo <= i1.lo);
    CHECK(wider.hi >= i1.hi);
}

TEST_CASE("anova identical groups and limiting separation") {
    const auto same = anova_oneway({{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}});
    CHECK(same.f == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(same.p == doctest::Approx(1.0).epsilon(1e-9));

    const auto separated = anova_oneway(
        {{0.0, 1e-9, -1e-9}, {1.0, 1.0 + 1e-9, 1.0 - 1e-9}});
    CHECK(separated.f > 1e10);
    CHECK(separated.p < 1e-10);

    const auto degenerate = anova_oneway({{1.0, 1.0}, {2.0, 2.0}});
    CHECK(std::isinf(degenerate.f));
    CHECK(degenerate.p == 1e-300);
}

TEST_CASE("anova matches the from-definition oracle on hand-sized groups") {
    const std::vector<std::vector<double>> groups{
        {3.1, 2.9, 3.4}, {4.0, 4.2, 3.8}, {2.2, 2.5, 2.1}};
    const auto got = anova_oneway(groups);

    // Explicit sums straight from the definition.
    double grand = 0.0;
    std::size_t n = 0;
    for (const auto& g : groups) {
        for (double x : g) {
            grand += x;
            ++n;
        }
    }
    grand /= static_cast<double>(n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        const double gm = std::accumulate(g.begin(), g.end(), 0.0) /
                          static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (gm - grand) * (gm - grand);
        for (double x : g) ssw += (x - gm) * (x - gm);
    }
    const double f_oracle = (ssb / 2.0) / (ssw / 6.0);
    CHECK(got.f == doctest::Approx(f_oracle).epsilon(1e-10));
    CHECK(got.df_between == 2);
    CHECK(got.df_within == 6);

    // Invariances: shift and common positive scaling leave F unchanged.
    std::vector<std::vector<double>> shifted = groups, scaled = groups;
    for (auto& g : shifted) {
        for (double& x : g) x += 11.0;
    }
    for (auto& g : scaled) {
        for (double& x : g) x *= 3.5;
    }
    CHECK(anova_oneway(shifted).f == doctest::Approx(got.f).epsilon(1e-9));
    CHECK(anova_oneway(scaled).f == doctest::Approx(got.f).epsilon(1e-9));
}

TEST_CASE("welch t-test cases and oracle") {
    const std::vector<double> same{1.0, 2.0, 3.0};
    const auto identical = t_test_two_sample(same, same);
    CHECK(identical.t == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(identical.p == doctest::Approx(1.0).epsilon(1e-9));

    const std::vector<double> zeros{0.0, 0.0, 0.0};
    const std::vector<double> tens{10.0, 10.1, 9.9};
    CHECK(t_test_two_sample(zeros, tens).p < 0.001);

    const std::vector<double> constant{5.0, 5.0};
    const auto flat = t_test_two_sample(constant, constant);
    CHECK(flat.p == 1.0);

    // From-definition Welch oracle.
    const std::vector<double> a{3.2, 2.8, 3.5, 3.0};
    const std::vector<double> b{2.1, 2.6, 2.4};
    const auto got = t_test_two_sample(a, b);
    const double ma = mean_of(a), mb = mean_of(b);
    const double va = sample_std(a) * sample_std(a) / 4.0;
    const double vb = sample_std(b) * sample_std(b) / 3.0;
    const double t_oracle = (ma - mb) / std::sqrt(va + vb);
    const double df_oracle =
        (va + vb) * (va + vb) / (va * va / 3.0 + vb * vb / 2.0);
    CHECK(got.t == doctest::Approx(t_oracle).epsilon(1e-10));
    CHECK(got.df == doctest::Approx(df_oracle).epsilon(1e-10));
}

TEST_CASE("pearson reproduces the width-speed correlation") {
    const std::vector<double> widths{128, 256, 512, 1024};
    const std::vector<double> t_nc{383, 327, 310, 257};
    const auto got = pearson(widths, t_nc);
    CHECK(std::fabs(got.r - (-0.94)) < 0.02);
    CHECK(got.p == doctest::Approx(0.056).epsilon(0.05));

    const std::vector<double> xs{1, 2, 3};
    const std::vector<double> line{5, 3, 1};
    CHECK(pearson(xs, line).r == doctest::Approx(-1.0).epsilon(1e-12));

    const std::vector<double> sym_x{-1, 0, 1};
    const std::vector<double> even_y{1, -5, 1};  // orthogonal to x
    CHECK(pearson(sym_x, even_y).r == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("loglog regression reproduces the width exponent") {
    const std::vector<double> widths{128, 256, 512, 1024};
    const std::vector<double> fn{1.241, 1.125, 1.096, 1.080};
    const auto got = loglog_regress(widths, fn);
    CHECK(std::fabs(got.slope - (-0.064)) < 0.005);
    CHECK(std::fabs(got.r2 - 0.84) < 0.05);
    CHECK(got.p_slope == doctest::Approx(0.08).epsilon(0.15));

    std::vector<double> xs{1, 2, 4, 8};
    std::vector<double> exact(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) exact[i] = std::pow(xs[i], -0.5);
    const auto pure = loglog_regress(xs, exact);
    CHECK(pure.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(pure.r2 == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> constant{2.0, 2.0, 2.0, 2.0};
    CHECK(loglog_regress(xs, constant).slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(loglog_regress(xs, std::vector<double>{1, -1, 1, 1}),
                    std::invalid_argument);
}

TEST_CASE("robustness ratios match the published rows") {
    CHECK(robustness_ratio(1.373, 1.077) == doctest::Approx(1.27).epsilon(0.005));
    CHECK(robustness_ratio(0.953, 1.112) == doctest::Approx(0.86).epsilon(0.005));
    CHECK(robustness_ratio(2.5, 2.5) == 1.0);
    CHECK_THROWS_AS(robustness_ratio(1.0, 0.0), std::invalid_argument);

    const std::vector<double> at_002{1.373, 0.953, 1.276, 1.222, 1.198, 1.153};
    const std::vector<double> at_001{1.077, 1.112, 1.241, 1.125, 1.035, 0.983};
    const auto cohort = robustness_ratio_cohort(at_002, at_001);
    CHECK(cohort.mean == doctest::Approx(1.10).epsilon(0.01));
    CHECK(cohort.std == doctest::Approx(0.14).epsilon(0.05));
}

TEST_CASE("grid effects reproduce the conditional percentages") {
    // Rows: architecture {dense=0, residual=1}; cols: dataset {0, 1}.
    const auto e = grid_effects(1.052, 0.901, 5.867, 1.515);
    CHECK(std::fabs(e.row_effect_at_col0 - 458.0) < 1.0);
    CHECK(std::fabs(e.row_effect_at_col1 - 68.0) < 1.0);
    CHECK(std::fabs(e.col_effect_at_row0 - (-14.0)) < 1.0);
    CHECK(std::fabs(e.col_effect_at_row1 - (-74.0)) < 1.0);
    CHECK(std::fabs(e.multiplicative_residual_pct - 232.0) < 1.0);

    // Exactly multiplicative grid leaves zero residual.
    const auto exact = grid_effects(2.0, 3.0, 4.0, 6.0);
    CHECK(exact.multiplicative_residual_pct == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(t_ci(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(anova_oneway({{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(grid_effects(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}
