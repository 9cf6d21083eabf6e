#include "nclab/optim.hpp"

#include <algorithm>
#include <cmath>

namespace nclab {

namespace {

void check_finite(const Gradients& grads) {
    for (const auto& g : grads.dw) {
        if (!g.all_finite()) throw DivergenceError("non-finite weight gradient");
    }
    for (const auto& g : grads.db) {
        for (double v : g) {
            if (!std::isfinite(v)) throw DivergenceError("non-finite bias gradient");
        }
    }
}

}  // namespace

AdamState::AdamState(const MlpModel& model, AdamConfig config) : config_(config) {
    for (const auto& layer : model.layers) {
        mw_.emplace_back(layer.w.rows(), layer.w.cols());
        vw_.emplace_back(layer.w.rows(), layer.w.cols());
        mb_.emplace_back(layer.b.size(), 0.0);
        vb_.emplace_back(layer.b.size(), 0.0);
    }
}

void AdamState::step(MlpModel& model, const Gradients& grads, double lr) {
    check_finite(grads);
    ++t_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        auto& layer = model.layers[li];
        double* w = layer.w.data();
        const double* g = grads.dw[li].data();
        double* m = mw_[li].data();
        double* v = vw_[li].data();
        for (std::size_t i = 0; i < layer.w.size(); ++i) {
            double ge = g[i];
            if (config_.weight_decay != 0.0 && !config_.decoupled) {
                ge += config_.weight_decay * w[i];
            }
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * ge;
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * ge * ge;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
            if (config_.weight_decay != 0.0 && config_.decoupled) {
                w[i] -= lr * config_.weight_decay * w[i];
            }
        }
        auto& b = layer.b;
        const auto& gb = grads.db[li];
        auto& mb = mb_[li];
        auto& vb = vb_[li];
        for (std::size_t i = 0; i < b.size(); ++i) {
            mb[i] = config_.beta1 * mb[i] + (1.0 - config_.beta1) * gb[i];
            vb[i] = config_.beta2 * vb[i] + (1.0 - config_.beta2) * gb[i] * gb[i];
            b[i] -= lr * (mb[i] / bc1) / (std::sqrt(vb[i] / bc2) + config_.eps);
        }
    }
}

SgdState::SgdState(const MlpModel& model, SgdConfig config) : config_(config) {
    for (const auto& layer : model.layers) {
        buf_w_.emplace_back(layer.w.rows(), layer.w.cols());
        buf_b_.emplace_back(layer.b.size(), 0.0);
    }
}

void SgdState::step(MlpModel& model, const Gradients& grads, double lr) {
    check_finite(grads);
    const double mu = config_.momentum;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        auto& layer = model.layers[li];
        double* w = layer.w.data();
        const double* g = grads.dw[li].data();
        double* buf = buf_w_[li].data();
        for (std::size_t i = 0; i < layer.w.size(); ++i) {
            const double ge = g[i] + config_.weight_decay * w[i];
            buf[i] = mu * buf[i] + ge;
            const double step = config_.nesterov ? ge + mu * buf[i] : buf[i];
            w[i] -= lr * step;
        }
        auto& b = layer.b;
        const auto& gb = grads.db[li];
        auto& buf_b = buf_b_[li];
        for (std::size_t i = 0; i < b.size(); ++i) {
            buf_b[i] = mu * buf_b[i] + gb[i];
            const double step = config_.nesterov ? gb[i] + mu * buf_b[i] : buf_b[i];
            b[i] -= lr * step;
        }
    }
}

double lr_at(const LrSchedule& schedule, std::size_t epoch, double base_lr) {
    if (const auto* cos = std::get_if<CosineSchedule>(&schedule)) {
        if (epoch >= cos->t_max) return cos->eta_min;
        const double frac = static_cast<double>(epoch) / static_cast<double>(cos->t_max);
        return cos->eta_min +
               (base_lr - cos->eta_min) * 0.5 * (1.0 + std::cos(M_PI * frac));
    }
    const auto& ms = std::get<MultiStepSchedule>(schedule);
    double lr = base_lr;
    for (std::size_t m : ms.milestones) {
        if (m <= epoch) lr *= ms.gamma;
    }
    return lr;
}

}  // namespace nclab
