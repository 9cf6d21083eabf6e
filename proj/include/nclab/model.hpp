#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nclab/matrix.hpp"
#include "nclab/rng.hpp"

namespace nclab {

enum class ActivationKind { ReLU, GELU, Tanh };
enum class LossKind { CrossEntropy, MseOneHot };

std::string to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);
std::string to_string(LossKind kind);

struct MlpConfig {
    std::size_t input_dim = 0;
    std::size_t depth = 1;  // number of hidden layers
    std::size_t width = 1;
    ActivationKind activation = ActivationKind::ReLU;
    std::size_t num_classes = 2;

    void validate() const;  // throws std::invalid_argument
};

struct Layer {
    Matrix w;                // out x in
    std::vector<double> b;   // length out
};

/// (Linear -> Act) x depth -> Linear head. Weights Kaiming normal with gain
/// sqrt(2/fan_in) for every activation; biases zero.
struct MlpModel {
    MlpConfig config;
    std::vector<Layer> layers;  // depth hidden layers + head, in order

    std::size_t param_count() const;
    const Layer& head() const { return layers.back(); }
    Layer& last_hidden() { return layers[layers.size() - 2]; }
};

MlpModel build_mlp(const MlpConfig& config, RngState& rng);

/// Per-batch forward record. Penultimate features are the post-activation
/// outputs of the final hidden layer, i.e. the head's input.
struct ForwardTrace {
    Matrix input;              // N x input_dim
    std::vector<Matrix> pre;   // pre-activations per layer
    std::vector<Matrix> act;   // activations per hidden layer (act.size() == depth)
    const Matrix& features() const { return act.back(); }
    const Matrix& logits() const { return pre.back(); }
};

ForwardTrace forward(const MlpModel& model, const Matrix& x);

struct Gradients {
    std::vector<Matrix> dw;
    std::vector<std::vector<double>> db;
};

struct LossGrad {
    double loss = 0.0;
    Gradients grads;
};

/// Mean-over-batch loss and analytic gradients for every W and b.
/// CE: softmax + NLL. MSE: (1/(N*K)) sum over batch and coordinates of
/// (logit - onehot)^2, no 1/2 factor.
LossGrad loss_and_grad(const ForwardTrace& trace, std::span<const int> labels,
                       LossKind kind, const MlpModel& model);

/// Loss only (evaluation passes); same conventions as loss_and_grad.
double loss_value(const Matrix& logits, std::span<const int> labels, LossKind kind);

double activation_apply(ActivationKind kind, double z);
double activation_deriv(ActivationKind kind, double z);

}  // namespace nclab
