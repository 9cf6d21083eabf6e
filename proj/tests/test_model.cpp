#include <doctest.h>

#include <cmath>

#include "nclab/model.hpp"
#include "oracles.hpp"

using namespace nclab;

namespace {

Matrix random_batch(RngState& rng, std::size_t n, std::size_t d) {
    Matrix x(n, d);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.next_gaussian();
    return x;
}

}  // namespace

TEST_CASE("build shapes and zero biases") {
    RngState rng(1);
    MlpModel m = build_mlp({3, 1, 4, ActivationKind::ReLU, 2}, rng);
    REQUIRE(m.layers.size() == 2);
    CHECK(m.layers[0].w.rows() == 4);
    CHECK(m.layers[0].w.cols() == 3);
    CHECK(m.layers[1].w.rows() == 2);
    CHECK(m.layers[1].w.cols() == 4);
    for (const auto& layer : m.layers) {
        for (double b : layer.b) CHECK(b == 0.0);
    }
}

TEST_CASE("parameter count closed form") {
    RngState rng(1);
    MlpModel m = build_mlp({784, 5, 512, ActivationKind::ReLU, 10}, rng);
    // 784*512+512 + 4*(512*512+512) + 512*10+10
    const std::size_t expected = 784 * 512 + 512 + 4 * (512 * 512 + 512) + 512 * 10 + 10;
    CHECK(m.param_count() == expected);
    CHECK(expected == 1457674);
}

TEST_CASE("forward on zero weights and identity weights") {
    RngState rng(1);
    MlpModel m = build_mlp({3, 1, 3, ActivationKind::ReLU, 3}, rng);
    for (auto& layer : m.layers) {
        for (std::size_t i = 0; i < layer.w.size(); ++i) layer.w.data()[i] = 0.0;
    }
    const Matrix x = Matrix::from_rows({{1, -2, 3}});
    auto trace = forward(m, x);
    for (std::size_t i = 0; i < trace.logits().size(); ++i) {
        CHECK(trace.logits().data()[i] == 0.0);
        CHECK(trace.features().data()[i] == 0.0);
    }

    // Identity hidden + identity head reproduces a nonnegative input.
    m.layers[0].w = Matrix::identity(3);
    m.layers[1].w = Matrix::identity(3);
    const Matrix pos = Matrix::from_rows({{0.5, 1.5, 2.0}});
    auto t2 = forward(m, pos);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(t2.logits()(0, j) == doctest::Approx(pos(0, j)).epsilon(0));
    }
    CHECK_THROWS_AS(forward(m, Matrix(1, 4)), ShapeError);
}

TEST_CASE("forward is deterministic") {
    RngState rng(11);
    MlpModel m = build_mlp({6, 2, 8, ActivationKind::GELU, 4}, rng);
    RngState xr(5);
    const Matrix x = random_batch(xr, 7, 6);
    auto t1 = forward(m, x);
    auto t2 = forward(m, x);
    CHECK(t1.logits() == t2.logits());
    CHECK(t1.features() == t2.features());
}

TEST_CASE("activation point values") {
    CHECK(activation_apply(ActivationKind::ReLU, -1.0) == 0.0);
    CHECK(activation_apply(ActivationKind::ReLU, 2.0) == 2.0);
    CHECK(activation_deriv(ActivationKind::ReLU, 2.0) == 1.0);
    CHECK(activation_apply(ActivationKind::Tanh, 0.0) == 0.0);
    CHECK(activation_deriv(ActivationKind::Tanh, 0.0) == 1.0);
    CHECK(activation_apply(ActivationKind::GELU, 0.0) == 0.0);
    CHECK(activation_apply(ActivationKind::GELU, 1.0) ==
          doctest::Approx(0.8413447460685429).epsilon(1e-9));
}

TEST_CASE("uniform logits give ln K cross-entropy") {
    RngState rng(1);
    MlpModel m = build_mlp({4, 1, 4, ActivationKind::ReLU, 10}, rng);
    Matrix logits(3, 10);  // all zero = uniform
    ForwardTrace trace;
    trace.pre.push_back(logits);
    const std::vector<int> labels{0, 3, 9};
    CHECK(loss_value(logits, labels, LossKind::CrossEntropy) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("one-hot logits give zero MSE") {
    Matrix logits(2, 3);
    logits(0, 1) = 1.0;
    logits(1, 2) = 1.0;
    const std::vector<int> labels{1, 2};
    CHECK(loss_value(logits, labels, LossKind::MseOneHot) == 0.0);
}

TEST_CASE("label out of range is rejected") {
    Matrix logits(1, 3);
    const std::vector<int> bad{3};
    CHECK_THROWS_AS(loss_value(logits, bad, LossKind::CrossEntropy), std::out_of_range);
}

TEST_CASE("analytic gradients match central finite differences") {
    // depth-3 / width-8, batch 5, every activation x both losses.
    for (auto act : {ActivationKind::ReLU, ActivationKind::GELU, ActivationKind::Tanh}) {
        for (auto loss : {LossKind::CrossEntropy, LossKind::MseOneHot}) {
            RngState rng(31);
            MlpModel m = build_mlp({6, 3, 8, act, 4}, rng);
            RngState xr(17);
            const Matrix x = random_batch(xr, 5, 6);
            const std::vector<int> labels{0, 1, 2, 3, 1};
            const auto lg = loss_and_grad(forward(m, x), labels, loss, m);
            const double worst = oracles::max_grad_rel_error(
                m, lg.grads,
                [&](const MlpModel& probe) {
                    return loss_value(forward(probe, x).logits(), labels, loss);
                });
            INFO("activation ", to_string(act), " loss ", to_string(loss),
                 " max rel err ", worst);
            CHECK(worst < 1e-4);
        }
    }
}

TEST_CASE("ReLU positive homogeneity of the last hidden layer") {
    RngState rng(3);
    MlpModel m = build_mlp({5, 3, 8, ActivationKind::ReLU, 3}, rng);
    RngState xr(4);
    const Matrix x = random_batch(xr, 9, 5);
    const auto base = forward(m, x);

    const double alpha = 1.7;
    MlpModel scaled = m;
    auto& hidden = scaled.layers[scaled.layers.size() - 2];
    for (std::size_t i = 0; i < hidden.w.size(); ++i) hidden.w.data()[i] *= alpha;
    for (double& b : hidden.b) b *= alpha;
    const auto after = forward(scaled, x);

    for (std::size_t i = 0; i < base.features().rows(); ++i) {
        double n0 = 0.0, n1 = 0.0;
        for (std::size_t j = 0; j < base.features().cols(); ++j) {
            n0 += base.features()(i, j) * base.features()(i, j);
            n1 += after.features()(i, j) * after.features()(i, j);
        }
        CHECK(std::sqrt(n1) == doctest::Approx(alpha * std::sqrt(n0)).epsilon(1e-9));
    }
}
