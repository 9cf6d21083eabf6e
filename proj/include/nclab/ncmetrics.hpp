#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nclab/matrix.hpp"

namespace nclab {

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Class-conditional geometry of a feature matrix.
///
/// Normalization convention, fixed project-wide: the within-class scatter
/// trace averages over samples (1/N) and the between-class trace over
/// classes (1/K); the global mean is sample-weighted.
struct FeatureStats {
    Matrix class_means;              // K x d
    std::vector<double> global_mean;
    Matrix centered_means;           // K x d, m_c = mu_c - mu_G
    double tr_sw = 0.0;
    double tr_sb = 0.0;
    std::vector<std::size_t> counts;
    std::size_t n = 0;
};

/// One-pass accumulator over feature batches: class sums, the global sum of
/// squared norms, and the sum of per-sample norms. Full-train-set metric
/// passes stream batches through this so the whole feature matrix is never
/// resident at once.
class FeatureAccumulator {
public:
    FeatureAccumulator(std::size_t k, std::size_t dim);

    void add(const Matrix& h, std::span<const int> labels);

    /// Throws MetricError if some class saw no samples.
    FeatureStats finalize() const;

    /// (1/N) * sum_i ||h_i||_2 over everything accumulated.
    double mean_norm() const;

    std::size_t count() const { return n_; }

private:
    Matrix class_sums_;   // K x d
    std::vector<std::size_t> counts_;
    double sum_sq_ = 0.0;
    double sum_norm_ = 0.0;
    std::size_t n_ = 0;
};

/// Two-in-one convenience for in-memory features.
FeatureStats feature_stats(const Matrix& h, std::span<const int> labels, std::size_t k);

/// Denominators at or below this are reported as degenerate (nullopt) so
/// trajectory logs never carry Inf/NaN.
inline constexpr double kDegenerateFloor = 1e-12;

/// Tr(Sigma_W)/Tr(Sigma_B); nullopt when the between trace is degenerate.
std::optional<double> nc1(const FeatureStats& stats);

/// Mean over ordered pairs i != j of |cos(m_i, m_j) + 1/(K-1)|.
std::optional<double> nc2(const FeatureStats& stats);

/// 1 - mean_c cos(w_c, m_c) with w_c the head row for class c.
std::optional<double> nc3(const FeatureStats& stats, const Matrix& head_w);

/// (1/N) * sum_i ||h_i||_2.
double mean_feature_norm(const Matrix& h);

/// Per-epoch metric row. Epochs are global and 1-based across phases.
struct NcSnapshot {
    std::size_t epoch = 0;
    int phase = 1;
    double lr = 0.0;
    double loss = 0.0;
    double train_acc = 0.0;
    std::optional<double> nc1;
    std::optional<double> nc2;
    std::optional<double> nc3;
    double fn = 0.0;
};

}  // namespace nclab
