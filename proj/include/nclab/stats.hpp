#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nclab/rng.hpp"

namespace nclab {

double mean_of(std::span<const double> xs);

/// Sample standard deviation, denominator n-1.
double sample_std(std::span<const double> xs);

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;  // 0 when n == 1
    double cv = 0.0;   // std/mean, defined only for mean != 0
};

SampleSummary summarize(std::span<const double> xs);

enum class CiMethod { StudentT, BootstrapPercentile };

struct CiResult {
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;
    CiMethod method = CiMethod::StudentT;
};

/// mean +/- t_{(1+level)/2, n-1} * std / sqrt(n).
CiResult t_ci(std::span<const double> xs, double level = 0.95);

/// Percentile interval of resampled means. Quantiles use linear
/// interpolation between order statistics: for q in [0,1] the value at
/// index (R-1)*q interpolated between floor and ceil. Seeded and
/// reproducible; resampling indices come from rng.next_below(n).
CiResult bootstrap_ci(std::span<const double> xs, RngState& rng,
                      std::size_t resamples = 10000, double level = 0.95);

struct AnovaResult {
    double f = 0.0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double p = 1.0;
};

/// One-way fixed-effects ANOVA. Zero within-group variance with nonzero
/// between yields F = inf and p floored at 1e-300.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Welch's t with Welch-Satterthwaite df, two-sided p. Two identical constant
/// samples give t = 0, p = 1.
TTestResult t_test_two_sample(std::span<const double> a, std::span<const double> b);

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;  // two-sided via t = r*sqrt((n-2)/(1-r^2))
};

PearsonResult pearson(std::span<const double> xs, std::span<const double> ys);

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double p_slope = 1.0;  // two-sided t on the slope, df = n-2
    std::size_t n = 0;
};

/// OLS on (ln x, ln y); the slope is the power-law exponent.
RegressionResult loglog_regress(std::span<const double> xs, std::span<const double> ys);

/// fn* measured at the looser criterion over fn* at the stricter one.
double robustness_ratio(double fn_star_at_eps2, double fn_star_at_eps1);

/// mean +/- std of elementwise ratios over a cohort of (eps2, eps1) pairs.
SampleSummary robustness_ratio_cohort(std::span<const double> fn_star_at_eps2,
                                      std::span<const double> fn_star_at_eps1);

/// Conditional effects of a 2x2 grid of positive cell means, in percent,
/// plus the residual of a multiplicative (log-additive) model on the
/// held-out (1,0) cell: anchored on the other three corners the model
/// predicts cell_10_hat = cell_00 * cell_11 / cell_01, and the residual is
/// (cell_10 - cell_10_hat) / cell_10_hat * 100. Rows index architecture,
/// columns index dataset in the grid analyses this feeds.
struct GridEffects {
    double row_effect_at_col0 = 0.0;  // (cell_10 - cell_00)/cell_00 * 100
    double row_effect_at_col1 = 0.0;  // (cell_11 - cell_01)/cell_01 * 100
    double col_effect_at_row0 = 0.0;  // (cell_01 - cell_00)/cell_00 * 100
    double col_effect_at_row1 = 0.0;  // (cell_11 - cell_10)/cell_10 * 100
    double multiplicative_residual_pct = 0.0;
};

GridEffects grid_effects(double cell_00, double cell_01, double cell_10,
                         double cell_11);

}  // namespace nclab
