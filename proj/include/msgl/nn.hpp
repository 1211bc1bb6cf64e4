#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msgl/autodiff.hpp"
#include "msgl/error.hpp"
#include "msgl/rng.hpp"
#include "msgl/tensor.hpp"

namespace msgl {

/// Ordered collection of named parameter tensors for one network.
/// Insertion order is fixed, which keeps optimizer traversal and
/// checkpoint layout deterministic.
class ParamSet {
public:
    Tensor& add(std::string name, Tensor tensor) {
        if (contains(name)) {
            throw ContractError("ParamSet: duplicate parameter name '" + name + "'");
        }
        items_.emplace_back(std::move(name), std::move(tensor));
        return items_.back().second;
    }

    bool contains(const std::string& name) const {
        for (const auto& [n, t] : items_) {
            if (n == name) return true;
        }
        return false;
    }

    Tensor& at(const std::string& name) {
        for (auto& [n, t] : items_) {
            if (n == name) return t;
        }
        throw ContractError("ParamSet: unknown parameter '" + name + "'");
    }

    const Tensor& at(const std::string& name) const {
        for (const auto& [n, t] : items_) {
            if (n == name) return t;
        }
        throw ContractError("ParamSet: unknown parameter '" + name + "'");
    }

    std::size_t size() const { return items_.size(); }

    auto begin() { return items_.begin(); }
    auto end() { return items_.end(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    void zero_grads() {
        for (auto& [n, t] : items_) {
            t.ensure_grad();
            t.zero_grad();
        }
    }

    bool grads_all_zero() const {
        for (const auto& [n, t] : items_) {
            if (!t.has_grad()) continue;
            for (double g : t.grad()) {
                if (g != 0.0) return false;
            }
        }
        return true;
    }

    friend bool operator==(const ParamSet& a, const ParamSet& b) {
        if (a.items_.size() != b.items_.size()) return false;
        for (std::size_t i = 0; i < a.items_.size(); ++i) {
            if (a.items_[i].first != b.items_[i].first) return false;
            if (!(a.items_[i].second == b.items_[i].second)) return false;
        }
        return true;
    }

private:
    std::vector<std::pair<std::string, Tensor>> items_;
};

enum class Activation { Relu, Lrelu, Tanh, Sigmoid, Linear };

inline Tape::NodeId apply_activation(Tape& tape, Tape::NodeId x, Activation act,
                                     double lrelu_slope) {
    switch (act) {
        case Activation::Relu: return tape.relu(x);
        case Activation::Lrelu: return tape.lrelu(x, lrelu_slope);
        case Activation::Tanh: return tape.tanh(x);
        case Activation::Sigmoid: return tape.sigmoid(x);
        case Activation::Linear: return x;
    }
    throw ContractError("unknown activation");
}

/// Seeded uniform init scaled by 1/sqrt(fan_in); biases start at zero.
inline Tensor init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    Tensor w({fan_in, fan_out});
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
    return w;
}

/// Plain fully connected net: hidden activation between layers, separate
/// output activation on the last layer.
struct Mlp {
    std::vector<std::size_t> layer_sizes;
    Activation hidden = Activation::Relu;
    Activation output = Activation::Linear;
    double lrelu_slope = 0.2;
    ParamSet params;

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
};

inline Mlp build_mlp(std::vector<std::size_t> layer_sizes, Activation hidden_act,
                     std::uint64_t seed, Activation output_act = Activation::Linear,
                     double lrelu_slope = 0.2) {
    if (layer_sizes.size() < 2) {
        throw ConfigError("build_mlp: at least two layer sizes required");
    }
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw ConfigError("build_mlp: layer sizes must be positive");
    }
    Mlp net;
    net.layer_sizes = std::move(layer_sizes);
    net.hidden = hidden_act;
    net.output = output_act;
    net.lrelu_slope = lrelu_slope;
    Rng rng = Rng::stream(seed, rng_stream::kInit);
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        net.params.add("w" + std::to_string(l),
                       init_weight(net.layer_sizes[l], net.layer_sizes[l + 1], rng));
        net.params.add("b" + std::to_string(l), Tensor({1, net.layer_sizes[l + 1]}));
    }
    return net;
}

namespace detail {

inline Tape::NodeId mlp_forward_impl(Tape& tape, const Mlp& net, Tape::NodeId input,
                                     bool trainable) {
    if (tape.value(input).cols() != net.input_dim()) {
        throw ShapeError("mlp forward: input width does not match first layer");
    }
    // Trainable registration needs mutable tensors; the const_cast is confined
    // here and guarded by the trainable flag.
    Mlp& mut = const_cast<Mlp&>(net);
    Tape::NodeId h = input;
    const std::size_t layers = net.layer_sizes.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        Tensor& w = mut.params.at("w" + std::to_string(l));
        Tensor& b = mut.params.at("b" + std::to_string(l));
        Tape::NodeId wn = trainable ? tape.param(w) : tape.leaf(w);
        Tape::NodeId bn = trainable ? tape.param(b) : tape.leaf(b);
        h = tape.add(tape.matmul(h, wn), bn);
        h = apply_activation(tape, h, l + 1 == layers ? net.output : net.hidden,
                             net.lrelu_slope);
    }
    return h;
}

}  // namespace detail

/// Forward pass that records gradients for the net's parameters.
inline Tape::NodeId mlp_forward(Tape& tape, Mlp& net, Tape::NodeId input) {
    return detail::mlp_forward_impl(tape, net, input, true);
}

/// Forward pass with parameters held fixed (no gradients recorded).
inline Tape::NodeId mlp_forward_frozen(Tape& tape, const Mlp& net, Tape::NodeId input) {
    return detail::mlp_forward_impl(tape, net, input, false);
}

/// Convenience inference without keeping the graph.
inline Tensor mlp_apply(const Mlp& net, const Tensor& input) {
    Tape tape;
    return tape.value(mlp_forward_frozen(tape, net, tape.leaf(input)));
}

/// Discriminator with a shared trunk and two linear heads: a one-dimensional
/// real/fake logit and a class-logit head (K rotation classes, plus one fake
/// class in the multi-class game).
struct TwoHeadNet {
    std::vector<std::size_t> trunk_sizes;  // input..last hidden
    std::size_t class_count = 4;
    double lrelu_slope = 0.2;
    ParamSet params;

    std::size_t input_dim() const { return trunk_sizes.front(); }
    std::size_t feature_dim() const { return trunk_sizes.back(); }
};

struct TwoHeadNodes {
    Tape::NodeId features;
    Tape::NodeId rf_logit;       // n x 1
    Tape::NodeId class_logits;   // n x class_count
};

inline TwoHeadNet build_two_head(std::vector<std::size_t> trunk_sizes, std::size_t class_count,
                                 std::uint64_t seed, double lrelu_slope = 0.2) {
    if (trunk_sizes.size() < 2) {
        throw ConfigError("build_two_head: trunk needs input and at least one hidden layer");
    }
    if (class_count < 2) throw ConfigError("build_two_head: class_count must be >= 2");
    TwoHeadNet net;
    net.trunk_sizes = std::move(trunk_sizes);
    net.class_count = class_count;
    net.lrelu_slope = lrelu_slope;
    Rng rng = Rng::stream(seed, rng_stream::kInit);
    for (std::size_t l = 0; l + 1 < net.trunk_sizes.size(); ++l) {
        net.params.add("t_w" + std::to_string(l),
                       init_weight(net.trunk_sizes[l], net.trunk_sizes[l + 1], rng));
        net.params.add("t_b" + std::to_string(l), Tensor({1, net.trunk_sizes[l + 1]}));
    }
    net.params.add("rf_w", init_weight(net.feature_dim(), 1, rng));
    net.params.add("rf_b", Tensor({1, 1}));
    net.params.add("cls_w", init_weight(net.feature_dim(), class_count, rng));
    net.params.add("cls_b", Tensor({1, class_count}));
    return net;
}

namespace detail {

inline TwoHeadNodes two_head_forward_impl(Tape& tape, const TwoHeadNet& net, Tape::NodeId input,
                                          bool trainable) {
    if (tape.value(input).cols() != net.input_dim()) {
        throw ShapeError("two_head forward: input width does not match trunk");
    }
    TwoHeadNet& mut = const_cast<TwoHeadNet&>(net);
    auto reg = [&](const std::string& name) {
        Tensor& t = mut.params.at(name);
        return trainable ? tape.param(t) : tape.leaf(t);
    };
    Tape::NodeId h = input;
    for (std::size_t l = 0; l + 1 < net.trunk_sizes.size(); ++l) {
        h = tape.add(tape.matmul(h, reg("t_w" + std::to_string(l))),
                     reg("t_b" + std::to_string(l)));
        h = tape.lrelu(h, net.lrelu_slope);
    }
    TwoHeadNodes out;
    out.features = h;
    out.rf_logit = tape.add(tape.matmul(h, reg("rf_w")), reg("rf_b"));
    out.class_logits = tape.add(tape.matmul(h, reg("cls_w")), reg("cls_b"));
    return out;
}

}  // namespace detail

inline TwoHeadNodes two_head_forward(Tape& tape, TwoHeadNet& net, Tape::NodeId input) {
    return detail::two_head_forward_impl(tape, net, input, true);
}

inline TwoHeadNodes two_head_forward_frozen(Tape& tape, const TwoHeadNet& net,
                                            Tape::NodeId input) {
    return detail::two_head_forward_impl(tape, net, input, false);
}

}  // namespace msgl
