#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "msgl/adam.hpp"
#include "msgl/gradcheck.hpp"
#include "msgl/nn.hpp"
#include "msgl/rng.hpp"

using msgl::Activation;
using msgl::AdamConfig;
using msgl::AdamState;
using msgl::Mlp;
using msgl::ParamSet;
using msgl::Rng;
using msgl::Tape;
using msgl::Tensor;

namespace {

// Plain triple-loop matrix product, independent of the tape path.
Tensor naive_matmul(const Tensor& a, const Tensor& b) {
    Tensor out({a.rows(), b.cols()});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a.at(i, k) * b.at(k, j);
            out.at(i, j) = acc;
        }
    }
    return out;
}

Tensor random_input(std::size_t rows, std::size_t cols, Rng& rng) {
    Tensor t({rows, cols});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
    return t;
}

}  // namespace

TEST_CASE("build_mlp is deterministic given the seed") {
    Mlp a = msgl::build_mlp({2, 4, 1}, Activation::Relu, 7);
    Mlp b = msgl::build_mlp({2, 4, 1}, Activation::Relu, 7);
    CHECK(a.params == b.params);
    Mlp c = msgl::build_mlp({2, 4, 1}, Activation::Relu, 8);
    CHECK_FALSE(a.params == c.params);
}

TEST_CASE("build_mlp zero-initializes biases") {
    Mlp net = msgl::build_mlp({2, 4, 1}, Activation::Relu, 7);
    for (double v : net.params.at("b0").values()) CHECK(v == 0.0);
    for (double v : net.params.at("b1").values()) CHECK(v == 0.0);
}

TEST_CASE("build_mlp first-layer weights respect the fan-in bound") {
    Mlp net = msgl::build_mlp({3, 5, 2}, Activation::Tanh, 1);
    const double bound = 1.0 / std::sqrt(3.0);
    for (double v : net.params.at("w0").values()) CHECK(std::fabs(v) <= bound);
}

TEST_CASE("build_mlp rejects degenerate layer lists") {
    CHECK_THROWS_AS(msgl::build_mlp({4}, Activation::Relu, 1), msgl::ConfigError);
    CHECK_THROWS_AS(msgl::build_mlp({}, Activation::Relu, 1), msgl::ConfigError);
}

TEST_CASE("zero weights and biases map any input to zero") {
    Mlp net = msgl::build_mlp({3, 2}, Activation::Linear, 1);
    for (double& v : net.params.at("w0").values()) v = 0.0;
    Rng rng(2);
    Tensor out = msgl::mlp_apply(net, random_input(4, 3, rng));
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("identity single layer reproduces its input") {
    Mlp net = msgl::build_mlp({3, 3}, Activation::Linear, 1);
    Tensor& w = net.params.at("w0");
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) w.at(i, j) = i == j ? 1.0 : 0.0;
    }
    Rng rng(3);
    Tensor in = random_input(5, 3, rng);
    Tensor out = msgl::mlp_apply(net, in);
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i] == Catch::Approx(in[i]));
}

TEST_CASE("two-layer forward matches a hand-rolled oracle") {
    Mlp net = msgl::build_mlp({3, 4, 2}, Activation::Tanh, 9);
    Rng rng(4);
    Tensor in = random_input(6, 3, rng);

    Tensor h = naive_matmul(in, net.params.at("w0"));
    for (std::size_t i = 0; i < h.rows(); ++i) {
        for (std::size_t j = 0; j < h.cols(); ++j) {
            h.at(i, j) = std::tanh(h.at(i, j) + net.params.at("b0").at(0, j));
        }
    }
    Tensor expect = naive_matmul(h, net.params.at("w1"));
    for (std::size_t i = 0; i < expect.rows(); ++i) {
        for (std::size_t j = 0; j < expect.cols(); ++j) {
            expect.at(i, j) += net.params.at("b1").at(0, j);
        }
    }

    Tensor got = msgl::mlp_apply(net, in);
    REQUIRE(got.same_shape(expect));
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == Catch::Approx(expect[i]).margin(1e-12));
    }
}

TEST_CASE("mlp rejects mismatched input width") {
    Mlp net = msgl::build_mlp({3, 2}, Activation::Relu, 1);
    Rng rng(5);
    CHECK_THROWS_AS(msgl::mlp_apply(net, random_input(4, 2, rng)), msgl::ShapeError);
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
    ParamSet params;
    params.add("w", Tensor({2, 2}, {1.0, -2.0, 3.0, 0.5}));
    params.zero_grads();
    AdamState adam(params, AdamConfig{});
    Tensor before = params.at("w");
    adam.step(params);
    CHECK(params.at("w") == before);
    CHECK(adam.step_count() == 1);
}

TEST_CASE("adam single step matches the hand-computed update") {
    AdamConfig cfg;
    cfg.lr = 0.0002;
    cfg.beta1 = 0.5;
    cfg.beta2 = 0.9;
    ParamSet params;
    params.add("w", Tensor({1}, {1.0}));
    params.at("w").ensure_grad();
    const double g = 0.3;
    params.at("w").grad()[0] = g;
    AdamState adam(params, cfg);
    adam.step(params);

    // m = (1-b1) g, v = (1-b2) g^2; with t=1 bias correction both hats equal
    // g and g^2, so the step is lr * g / (|g| + eps).
    const double m_hat = (1.0 - cfg.beta1) * g / (1.0 - cfg.beta1);
    const double v_hat = (1.0 - cfg.beta2) * g * g / (1.0 - cfg.beta2);
    const double expect = 1.0 - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    CHECK(params.at("w")[0] == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("adam second step uses t=2 bias correction") {
    AdamConfig cfg;
    ParamSet params;
    params.add("w", Tensor({1}, {0.0}));
    params.at("w").ensure_grad();
    params.at("w").grad()[0] = 1.0;
    AdamState adam(params, cfg);
    adam.step(params);
    params.at("w").grad()[0] = 1.0;
    adam.step(params);
    CHECK(adam.step_count() == 2);

    // Replay the recurrence by hand.
    double m = 0.0, v = 0.0, x = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1);
        v = cfg.beta2 * v + (1.0 - cfg.beta2);
        const double m_hat = m / (1.0 - std::pow(cfg.beta1, t));
        const double v_hat = v / (1.0 - std::pow(cfg.beta2, t));
        x -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
    CHECK(params.at("w")[0] == Catch::Approx(x).epsilon(1e-12));
}

TEST_CASE("adam refuses to step without gradients") {
    ParamSet params;
    params.add("w", Tensor({1}, {0.0}));
    AdamState adam(params, AdamConfig{});
    CHECK_THROWS_AS(adam.step(params), msgl::ContractError);
}

TEST_CASE("finite differences are exact for a linear loss") {
    ParamSet params;
    Rng rng(6);
    params.add("w", random_input(2, 3, rng));
    Tensor c = random_input(2, 3, rng);
    auto report = msgl::finite_difference_check(params, [&](Tape& t) {
        return t.sum(t.mul(t.param(params.at("w")), t.leaf(c)));
    });
    CHECK(report.max_rel_error <= 1e-8);
}

TEST_CASE("softmax cross-entropy head passes the FD oracle") {
    Mlp net = msgl::build_mlp({3, 6, 4}, Activation::Lrelu, 21);
    Rng rng(7);
    Tensor in = random_input(5, 3, rng);
    std::vector<std::size_t> labels = {0, 3, 1, 2, 0};
    auto report = msgl::finite_difference_check(net.params, [&](Tape& t) {
        Tape::NodeId logits = msgl::mlp_forward(t, net, t.leaf(in));
        return t.scale(t.mean(t.log(t.pick(t.softmax(logits), labels))), -1.0);
    });
    CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("sigmoid BCE passes the FD oracle") {
    Mlp net = msgl::build_mlp({3, 6, 1}, Activation::Tanh, 22);
    Rng rng(8);
    Tensor in = random_input(5, 3, rng);
    auto report = msgl::finite_difference_check(net.params, [&](Tape& t) {
        Tape::NodeId logits = msgl::mlp_forward(t, net, t.leaf(in));
        Tape::NodeId p = t.sigmoid(logits);
        Tape::NodeId ones = t.leaf(Tensor::full({5, 1}, 1.0));
        Tape::NodeId loss_pos = t.scale(t.mean(t.log(p)), -0.5);
        Tape::NodeId loss_neg = t.scale(t.mean(t.log(t.sub(ones, p))), -0.5);
        return t.add(loss_pos, loss_neg);
    });
    CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("two-head net shares trunk gradients across heads") {
    msgl::TwoHeadNet net = msgl::build_two_head({3, 8}, 5, 31);
    Rng rng(9);
    Tensor in = random_input(4, 3, rng);
    auto report = msgl::finite_difference_check(net.params, [&](Tape& t) {
        msgl::TwoHeadNodes heads = msgl::two_head_forward(t, net, t.leaf(in));
        Tape::NodeId rf = t.mean(t.sigmoid(heads.rf_logit));
        Tape::NodeId cls = t.mean(t.softmax(heads.class_logits));
        return t.add(rf, cls);
    });
    CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("frozen forward leaves parameter gradients untouched") {
    msgl::TwoHeadNet net = msgl::build_two_head({2, 4}, 5, 32);
    net.params.zero_grads();
    Rng rng(10);
    Tape tape;
    msgl::TwoHeadNodes heads =
        msgl::two_head_forward_frozen(tape, net, tape.leaf(random_input(3, 2, rng)));
    tape.backward(tape.mean(heads.rf_logit));
    CHECK(net.params.grads_all_zero());
}
