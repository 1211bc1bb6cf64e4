#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msgl/error.hpp"
#include "msgl/nn.hpp"

namespace msgl {

struct AdamConfig {
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.9;
    double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are keyed by parameter name and
/// sized against the ParamSet at construction.
class AdamState {
public:
    AdamState() = default;

    AdamState(const ParamSet& params, AdamConfig config) : config_(config) {
        for (const auto& [name, tensor] : params) {
            moments_.emplace_back(name, Moments{std::vector<double>(tensor.size(), 0.0),
                                                std::vector<double>(tensor.size(), 0.0)});
        }
    }

    const AdamConfig& config() const { return config_; }
    std::uint64_t step_count() const { return step_; }

    void step(ParamSet& params) {
        ++step_;
        const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
        std::size_t i = 0;
        for (auto& [name, tensor] : params) {
            if (i >= moments_.size() || moments_[i].first != name) {
                throw ContractError("AdamState: parameter set does not match optimizer state");
            }
            if (!tensor.has_grad()) {
                throw ContractError("AdamState: missing gradient for '" + name + "'");
            }
            Moments& mo = moments_[i].second;
            const std::vector<double>& g = tensor.grad();
            for (std::size_t j = 0; j < tensor.size(); ++j) {
                mo.m[j] = config_.beta1 * mo.m[j] + (1.0 - config_.beta1) * g[j];
                mo.v[j] = config_.beta2 * mo.v[j] + (1.0 - config_.beta2) * g[j] * g[j];
                const double m_hat = mo.m[j] / bc1;
                const double v_hat = mo.v[j] / bc2;
                tensor[j] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
            }
            ++i;
        }
    }

    // Serialization access (checkpointing).
    struct Moments {
        std::vector<double> m;
        std::vector<double> v;
    };

    std::vector<std::pair<std::string, Moments>>& moments() { return moments_; }
    const std::vector<std::pair<std::string, Moments>>& moments() const { return moments_; }
    void restore(std::uint64_t step) { step_ = step; }
    AdamConfig& mutable_config() { return config_; }

private:
    AdamConfig config_;
    std::uint64_t step_ = 0;
    std::vector<std::pair<std::string, Moments>> moments_;
};

}  // namespace msgl
