#include "nclab/model.hpp"

#include <cmath>
#include <stdexcept>

#include "nclab/special.hpp"

namespace nclab {

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::GELU: return "gelu";
        case ActivationKind::Tanh: return "tanh";
    }
    return "?";
}

ActivationKind activation_from_string(const std::string& name) {
    if (name == "relu") return ActivationKind::ReLU;
    if (name == "gelu") return ActivationKind::GELU;
    if (name == "tanh") return ActivationKind::Tanh;
    throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(LossKind kind) {
    return kind == LossKind::CrossEntropy ? "cross_entropy" : "mse_onehot";
}

void MlpConfig::validate() const {
    if (input_dim == 0) throw std::invalid_argument("MlpConfig: input_dim >= 1");
    if (depth == 0) throw std::invalid_argument("MlpConfig: depth >= 1");
    if (width == 0) throw std::invalid_argument("MlpConfig: width >= 1");
    if (num_classes < 2) throw std::invalid_argument("MlpConfig: num_classes >= 2");
}

std::size_t MlpModel::param_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.w.size() + layer.b.size();
    return n;
}

MlpModel build_mlp(const MlpConfig& config, RngState& rng) {
    config.validate();
    MlpModel model;
    model.config = config;
    std::size_t in = config.input_dim;
    for (std::size_t l = 0; l < config.depth; ++l) {
        model.layers.push_back({kaiming_normal(rng, in, config.width),
                                std::vector<double>(config.width, 0.0)});
        in = config.width;
    }
    model.layers.push_back({kaiming_normal(rng, in, config.num_classes),
                            std::vector<double>(config.num_classes, 0.0)});
    return model;
}

double activation_apply(ActivationKind kind, double z) {
    switch (kind) {
        case ActivationKind::ReLU: return z > 0.0 ? z : 0.0;
        case ActivationKind::GELU: return z * special::normal_cdf(z);
        case ActivationKind::Tanh: return std::tanh(z);
    }
    return 0.0;
}

double activation_deriv(ActivationKind kind, double z) {
    switch (kind) {
        case ActivationKind::ReLU: return z > 0.0 ? 1.0 : 0.0;
        case ActivationKind::GELU:
            return special::normal_cdf(z) + z * special::normal_pdf(z);
        case ActivationKind::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
    }
    return 0.0;
}

namespace {

// z = x * W^T + b, row-major everywhere.
Matrix affine(const Matrix& x, const Layer& layer) {
    Matrix z = matmul(x, transpose(layer.w));
    for (std::size_t i = 0; i < z.rows(); ++i) {
        auto row = z.row(i);
        for (std::size_t j = 0; j < z.cols(); ++j) row[j] += layer.b[j];
    }
    return z;
}

}  // namespace

ForwardTrace forward(const MlpModel& model, const Matrix& x) {
    if (x.cols() != model.config.input_dim) {
        throw ShapeError("forward: input " + x.shape_str() + ", expected cols " +
                         std::to_string(model.config.input_dim));
    }
    ForwardTrace trace;
    trace.input = x;
    const Matrix* cur = &trace.input;
    for (std::size_t l = 0; l < model.config.depth; ++l) {
        Matrix z = affine(*cur, model.layers[l]);
        Matrix a(z.rows(), z.cols());
        for (std::size_t i = 0; i < z.size(); ++i) {
            a.data()[i] = activation_apply(model.config.activation, z.data()[i]);
        }
        trace.pre.push_back(std::move(z));
        trace.act.push_back(std::move(a));
        cur = &trace.act.back();
    }
    trace.pre.push_back(affine(*cur, model.layers.back()));
    return trace;
}

double loss_value(const Matrix& logits, std::span<const int> labels, LossKind kind) {
    const std::size_t n = logits.rows(), k = logits.cols();
    if (labels.size() != n) throw std::invalid_argument("loss: labels/batch mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= k) {
            throw std::out_of_range("loss: label " + std::to_string(y) +
                                    " outside 0.." + std::to_string(k - 1));
        }
        auto row = logits.row(i);
        if (kind == LossKind::CrossEntropy) {
            double zmax = row[0];
            for (double v : row) zmax = std::max(zmax, v);
            double sumexp = 0.0;
            for (double v : row) sumexp += std::exp(v - zmax);
            total += -(row[y] - zmax - std::log(sumexp));
        } else {
            for (std::size_t c = 0; c < k; ++c) {
                const double diff = row[c] - (static_cast<std::size_t>(y) == c ? 1.0 : 0.0);
                total += diff * diff;
            }
        }
    }
    return kind == LossKind::CrossEntropy ? total / static_cast<double>(n)
                                          : total / static_cast<double>(n * k);
}

LossGrad loss_and_grad(const ForwardTrace& trace, std::span<const int> labels,
                       LossKind kind, const MlpModel& model) {
    const Matrix& logits = trace.logits();
    const std::size_t n = logits.rows(), k = logits.cols();
    LossGrad out;
    out.loss = loss_value(logits, labels, kind);

    Matrix delta(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = static_cast<std::size_t>(labels[i]);
        auto zrow = logits.row(i);
        auto drow = delta.row(i);
        if (kind == LossKind::CrossEntropy) {
            double zmax = zrow[0];
            for (double v : zrow) zmax = std::max(zmax, v);
            double sumexp = 0.0;
            for (double v : zrow) sumexp += std::exp(v - zmax);
            for (std::size_t c = 0; c < k; ++c) {
                const double p = std::exp(zrow[c] - zmax) / sumexp;
                drow[c] = (p - (c == y ? 1.0 : 0.0)) / static_cast<double>(n);
            }
        } else {
            for (std::size_t c = 0; c < k; ++c) {
                drow[c] = 2.0 * (zrow[c] - (c == y ? 1.0 : 0.0)) /
                          static_cast<double>(n * k);
            }
        }
    }

    const std::size_t n_layers = model.layers.size();
    out.grads.dw.resize(n_layers);
    out.grads.db.resize(n_layers);
    for (std::size_t li = n_layers; li-- > 0;) {
        const Matrix& a_prev = li == 0 ? trace.input : trace.act[li - 1];
        out.grads.dw[li] = matmul(transpose(delta), a_prev);
        auto& db = out.grads.db[li];
        db.assign(delta.cols(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            auto row = delta.row(i);
            for (std::size_t j = 0; j < delta.cols(); ++j) db[j] += row[j];
        }
        if (li == 0) break;
        Matrix back = matmul(delta, model.layers[li].w);
        const Matrix& z = trace.pre[li - 1];
        for (std::size_t i = 0; i < back.size(); ++i) {
            back.data()[i] *= activation_deriv(model.config.activation, z.data()[i]);
        }
        delta = std::move(back);
    }
    return out;
}

}  // namespace nclab
