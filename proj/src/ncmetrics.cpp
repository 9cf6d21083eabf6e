#include "nclab/ncmetrics.hpp"

#include <algorithm>
#include <cmath>

namespace nclab {

FeatureAccumulator::FeatureAccumulator(std::size_t k, std::size_t dim)
    : class_sums_(k, dim), counts_(k, 0) {
    if (k < 2) throw std::invalid_argument("FeatureAccumulator: k >= 2");
}

void FeatureAccumulator::add(const Matrix& h, std::span<const int> labels) {
    if (h.rows() != labels.size()) {
        throw std::invalid_argument("FeatureAccumulator: batch/label mismatch");
    }
    if (h.cols() != class_sums_.cols()) {
        throw ShapeError("FeatureAccumulator: feature dim " + std::to_string(h.cols()) +
                         " != " + std::to_string(class_sums_.cols()));
    }
    for (std::size_t i = 0; i < h.rows(); ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= counts_.size()) {
            throw std::out_of_range("FeatureAccumulator: label out of range");
        }
        auto sums = class_sums_.row(static_cast<std::size_t>(label));
        auto row = h.row(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < h.cols(); ++j) {
            sums[j] += row[j];
            sq += row[j] * row[j];
        }
        sum_sq_ += sq;
        sum_norm_ += std::sqrt(sq);
        ++counts_[static_cast<std::size_t>(label)];
        ++n_;
    }
}

FeatureStats FeatureAccumulator::finalize() const {
    const std::size_t k = counts_.size(), d = class_sums_.cols();
    for (std::size_t c = 0; c < k; ++c) {
        if (counts_[c] == 0) {
            throw MetricError("empty class " + std::to_string(c) + " in metric pass");
        }
    }
    FeatureStats stats;
    stats.counts = counts_;
    stats.n = n_;
    stats.class_means = Matrix(k, d);
    stats.global_mean.assign(d, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        auto mean = stats.class_means.row(c);
        auto sums = class_sums_.row(c);
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] = sums[j] / static_cast<double>(counts_[c]);
            stats.global_mean[j] += sums[j];
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        stats.global_mean[j] /= static_cast<double>(n_);
    }
    stats.centered_means = Matrix(k, d);
    double sum_class_sq = 0.0;  // sum_c n_c * ||mu_c||^2
    double between = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        auto mean = stats.class_means.row(c);
        auto m = stats.centered_means.row(c);
        double mu_sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            mu_sq += mean[j] * mean[j];
            m[j] = mean[j] - stats.global_mean[j];
            between += m[j] * m[j];
        }
        sum_class_sq += static_cast<double>(counts_[c]) * mu_sq;
    }
    // sum ||h - mu_c||^2 = sum ||h||^2 - sum_c n_c ||mu_c||^2; clamp the tiny
    // negative that cancellation can leave when within-class scatter ~ 0.
    stats.tr_sw = std::max(0.0, (sum_sq_ - sum_class_sq) / static_cast<double>(n_));
    stats.tr_sb = std::max(0.0, between / static_cast<double>(k));
    return stats;
}

double FeatureAccumulator::mean_norm() const {
    if (n_ == 0) throw MetricError("mean_norm over empty accumulator");
    return sum_norm_ / static_cast<double>(n_);
}

FeatureStats feature_stats(const Matrix& h, std::span<const int> labels, std::size_t k) {
    FeatureAccumulator acc(k, h.cols());
    acc.add(h, labels);
    return acc.finalize();
}

std::optional<double> nc1(const FeatureStats& stats) {
    if (stats.tr_sb <= kDegenerateFloor) return std::nullopt;
    return stats.tr_sw / stats.tr_sb;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::optional<double> nc2(const FeatureStats& stats) {
    const std::size_t k = stats.centered_means.rows();
    std::vector<double> norms(k);
    for (std::size_t c = 0; c < k; ++c) {
        norms[c] = norm(stats.centered_means.row(c));
        if (norms[c] <= kDegenerateFloor) return std::nullopt;
    }
    const double target = 1.0 / static_cast<double>(k - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const double cos_ij =
                dot(stats.centered_means.row(i), stats.centered_means.row(j)) /
                (norms[i] * norms[j]);
            total += std::fabs(cos_ij + target);
        }
    }
    return total / static_cast<double>(k * (k - 1));
}

std::optional<double> nc3(const FeatureStats& stats, const Matrix& head_w) {
    const std::size_t k = stats.centered_means.rows();
    if (head_w.rows() != k || head_w.cols() != stats.centered_means.cols()) {
        throw ShapeError("nc3: head " + head_w.shape_str() + " vs means " +
                         stats.centered_means.shape_str());
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double nw = norm(head_w.row(c));
        const double nm = norm(stats.centered_means.row(c));
        if (nw <= kDegenerateFloor || nm <= kDegenerateFloor) return std::nullopt;
        total += dot(head_w.row(c), stats.centered_means.row(c)) / (nw * nm);
    }
    return 1.0 - total / static_cast<double>(k);
}

double mean_feature_norm(const Matrix& h) {
    if (h.rows() == 0) throw MetricError("mean_feature_norm over empty matrix");
    double total = 0.0;
    for (std::size_t i = 0; i < h.rows(); ++i) total += norm(h.row(i));
    return total / static_cast<double>(h.rows());
}

}  // namespace nclab
