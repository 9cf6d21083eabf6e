#include "nclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nclab/special.hpp"

namespace nclab {

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean_of: empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_std: n >= 2");
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

SampleSummary summarize(std::span<const double> xs) {
    SampleSummary s;
    s.n = xs.size();
    s.mean = mean_of(xs);
    s.std = xs.size() >= 2 ? sample_std(xs) : 0.0;
    s.cv = s.mean != 0.0 ? s.std / s.mean : 0.0;
    return s;
}

CiResult t_ci(std::span<const double> xs, double level) {
    if (xs.size() < 2) throw std::invalid_argument("t_ci: n >= 2");
    const double m = mean_of(xs);
    const double sd = sample_std(xs);
    const double df = static_cast<double>(xs.size() - 1);
    const double tq = special::student_t_quantile(level, df);
    const double half = tq * sd / std::sqrt(static_cast<double>(xs.size()));
    return {m - half, m + half, level, CiMethod::StudentT};
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

CiResult bootstrap_ci(std::span<const double> xs, RngState& rng,
                      std::size_t resamples, double level) {
    if (xs.size() < 2) throw std::invalid_argument("bootstrap_ci: n >= 2");
    if (resamples == 0) throw std::invalid_argument("bootstrap_ci: resamples >= 1");
    std::vector<double> means(resamples);
    const auto n = static_cast<std::uint64_t>(xs.size());
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) s += xs[rng.next_below(n)];
        m = s / static_cast<double>(xs.size());
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - level) / 2.0;
    return {quantile_sorted(means, alpha), quantile_sorted(means, 1.0 - alpha), level,
            CiMethod::BootstrapPercentile};
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("anova_oneway: >= 2 groups");
    std::size_t n_total = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("anova_oneway: empty group");
        n_total += g.size();
        for (double x : g) grand_sum += x;
    }
    if (n_total <= groups.size()) {
        throw std::invalid_argument("anova_oneway: total N must exceed group count");
    }
    const double grand_mean = grand_sum / static_cast<double>(n_total);
    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double gm = mean_of(g);
        ss_between += static_cast<double>(g.size()) * (gm - grand_mean) * (gm - grand_mean);
        for (double x : g) ss_within += (x - gm) * (x - gm);
    }
    AnovaResult result;
    result.df_between = groups.size() - 1;
    result.df_within = n_total - groups.size();
    const double ms_between = ss_between / static_cast<double>(result.df_between);
    const double ms_within = ss_within / static_cast<double>(result.df_within);
    if (ms_within == 0.0) {
        if (ms_between == 0.0) {
            result.f = 0.0;
            result.p = 1.0;
            return result;
        }
        result.f = std::numeric_limits<double>::infinity();
        result.p = 1e-300;
        return result;
    }
    result.f = ms_between / ms_within;
    result.p = std::max(special::f_survival(result.f,
                                            static_cast<double>(result.df_between),
                                            static_cast<double>(result.df_within)),
                        1e-300);
    return result;
}

TTestResult t_test_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("t_test_two_sample: each n >= 2");
    }
    const double ma = mean_of(a), mb = mean_of(b);
    const double sa = sample_std(a), sb = sample_std(b);
    const double va_n = sa * sa / static_cast<double>(a.size());
    const double vb_n = sb * sb / static_cast<double>(b.size());
    TTestResult result;
    if (va_n + vb_n == 0.0) {
        // Both samples constant: equal means give p = 1, unequal give p -> 0.
        result.t = ma == mb ? 0.0 : std::numeric_limits<double>::infinity();
        result.df = static_cast<double>(a.size() + b.size() - 2);
        result.p = ma == mb ? 1.0 : 0.0;
        return result;
    }
    result.t = (ma - mb) / std::sqrt(va_n + vb_n);
    result.df = (va_n + vb_n) * (va_n + vb_n) /
                (va_n * va_n / static_cast<double>(a.size() - 1) +
                 vb_n * vb_n / static_cast<double>(b.size() - 1));
    result.p = special::student_t_two_sided_p(result.t, result.df);
    return result;
}

PearsonResult pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 3) throw std::invalid_argument("pearson: n >= 3");
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::invalid_argument("pearson: zero variance input");
    }
    PearsonResult result;
    result.r = sxy / std::sqrt(sxx * syy);
    const double df = static_cast<double>(xs.size() - 2);
    const double denom = 1.0 - result.r * result.r;
    if (denom <= 0.0) {
        result.p = 0.0;
    } else {
        result.p = special::student_t_two_sided_p(result.r * std::sqrt(df / denom), df);
    }
    return result;
}

RegressionResult loglog_regress(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("loglog_regress: length mismatch");
    }
    if (xs.size() < 3) throw std::invalid_argument("loglog_regress: n >= 3");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0.0 || ys[i] <= 0.0) {
            throw std::invalid_argument("loglog_regress: inputs must be positive");
        }
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    const double mx = mean_of(lx), my = mean_of(ly);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("loglog_regress: constant x");
    RegressionResult result;
    result.n = xs.size();
    result.slope = sxy / sxx;
    result.intercept = my - result.slope * mx;
    if (syy == 0.0) {
        result.r2 = 1.0;  // constant y fits exactly with slope 0
        result.p_slope = 1.0;
        return result;
    }
    const double ss_res = syy - result.slope * sxy;
    result.r2 = 1.0 - ss_res / syy;
    const double df = static_cast<double>(xs.size() - 2);
    const double se_slope = std::sqrt(std::max(ss_res, 0.0) / df / sxx);
    if (se_slope == 0.0) {
        result.p_slope = result.slope == 0.0 ? 1.0 : 0.0;
    } else {
        result.p_slope = special::student_t_two_sided_p(result.slope / se_slope, df);
    }
    return result;
}

double robustness_ratio(double fn_star_at_eps2, double fn_star_at_eps1) {
    if (!(fn_star_at_eps2 > 0.0) || !(fn_star_at_eps1 > 0.0)) {
        throw std::invalid_argument("robustness_ratio: inputs must be positive");
    }
    return fn_star_at_eps2 / fn_star_at_eps1;
}

SampleSummary robustness_ratio_cohort(std::span<const double> fn_star_at_eps2,
                                      std::span<const double> fn_star_at_eps1) {
    if (fn_star_at_eps2.size() != fn_star_at_eps1.size() || fn_star_at_eps2.empty()) {
        throw std::invalid_argument("robustness_ratio_cohort: matched non-empty inputs");
    }
    std::vector<double> ratios(fn_star_at_eps2.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        ratios[i] = robustness_ratio(fn_star_at_eps2[i], fn_star_at_eps1[i]);
    }
    return summarize(ratios);
}

GridEffects grid_effects(double cell_00, double cell_01, double cell_10,
                         double cell_11) {
    for (double cell : {cell_00, cell_01, cell_10, cell_11}) {
        if (!(cell > 0.0)) throw std::invalid_argument("grid_effects: cells > 0");
    }
    GridEffects e;
    e.row_effect_at_col0 = (cell_10 - cell_00) / cell_00 * 100.0;
    e.row_effect_at_col1 = (cell_11 - cell_01) / cell_01 * 100.0;
    e.col_effect_at_row0 = (cell_01 - cell_00) / cell_00 * 100.0;
    e.col_effect_at_row1 = (cell_11 - cell_10) / cell_10 * 100.0;
    // Multiplicative model anchored on the other three cells, evaluated on
    // the held-out (1,0) corner.
    const double predicted_10 = cell_00 * cell_11 / cell_01;
    e.multiplicative_residual_pct = (cell_10 - predicted_10) / predicted_10 * 100.0;
    return e;
}

}  // namespace nclab
