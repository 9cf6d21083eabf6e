#pragma once

#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "nclab/model.hpp"

namespace nclab {

/// Raised when a step sees non-finite gradients or parameters; the run layer
/// converts it into a Diverged status with the partial log retained.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdamConfig {
    double base_lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;   // lambda
    bool decoupled = false;      // false: coupled L2 (g + lambda*w) inside the update
};

struct SgdConfig {
    double base_lr = 0.1;
    double momentum = 0.9;
    bool nesterov = true;
    double weight_decay = 0.0;
};

/// Per-parameter first/second moments mirroring the model's layers.
class AdamState {
public:
    AdamState(const MlpModel& model, AdamConfig config);
    const AdamConfig& config() const { return config_; }
    std::size_t step_count() const { return t_; }

    /// Bias-corrected Adam update with g_eff = g + lambda*w on weight
    /// matrices; biases receive no weight decay.
    void step(MlpModel& model, const Gradients& grads, double lr);

private:
    AdamConfig config_;
    std::size_t t_ = 0;
    std::vector<Matrix> mw_, vw_;
    std::vector<std::vector<double>> mb_, vb_;
};

class SgdState {
public:
    SgdState(const MlpModel& model, SgdConfig config);
    const SgdConfig& config() const { return config_; }

    /// Nesterov momentum update with g_eff = g + lambda*w on weights only.
    void step(MlpModel& model, const Gradients& grads, double lr);

private:
    SgdConfig config_;
    std::vector<Matrix> buf_w_;
    std::vector<std::vector<double>> buf_b_;
};

struct CosineSchedule {
    std::size_t t_max = 1;
    double eta_min = 0.0;
};

struct MultiStepSchedule {
    std::vector<std::size_t> milestones;  // strictly increasing
    double gamma = 0.1;
};

using LrSchedule = std::variant<CosineSchedule, MultiStepSchedule>;

/// Cosine: eta_min + (base - eta_min)*(1 + cos(pi*epoch/T_max))/2, clamped to
/// eta_min past T_max. MultiStep: base * gamma^(#milestones <= epoch).
/// epoch is 0-based within the schedule's span.
double lr_at(const LrSchedule& schedule, std::size_t epoch, double base_lr);

}  // namespace nclab
