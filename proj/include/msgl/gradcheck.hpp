#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "msgl/autodiff.hpp"
#include "msgl/nn.hpp"

namespace msgl {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

/// Compare analytic gradients against central finite differences for every
/// element of every parameter. The loss builder must be deterministic and
/// must register the params on the tape it is given.
///
/// Error metric: |analytic - fd| / max(|analytic|, |fd|, 1e-3). The floor
/// keeps near-zero components from amplifying FD roundoff into spurious
/// failures; above it the metric is plain relative error.
inline GradCheckReport finite_difference_check(ParamSet& params,
                                               const std::function<Tape::NodeId(Tape&)>& loss,
                                               double h = 1e-5) {
    Tape tape;
    Tape::NodeId loss_node = loss(tape);
    tape.backward(loss_node);

    auto loss_value = [&]() {
        Tape t;
        return t.scalar_value(loss(t));
    };

    GradCheckReport report;
    for (auto& [name, tensor] : params) {
        const std::vector<double> analytic = tensor.grad();
        for (std::size_t j = 0; j < tensor.size(); ++j) {
            const double saved = tensor[j];
            tensor[j] = saved + h;
            const double up = loss_value();
            tensor[j] = saved - h;
            const double down = loss_value();
            tensor[j] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double denom = std::max({std::fabs(analytic[j]), std::fabs(fd), 1e-3});
            const double rel = std::fabs(analytic[j] - fd) / denom;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = name;
                report.worst_index = j;
            }
            ++report.checked;
        }
    }
    return report;
}

}  // namespace msgl
