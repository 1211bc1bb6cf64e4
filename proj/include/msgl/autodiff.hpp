#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msgl/error.hpp"
#include "msgl/tensor.hpp"
#include "msgl/transforms.hpp"

namespace msgl {

/// Reverse-mode tape. Operations append nodes in topological order; backward()
/// walks the tape once in reverse and accumulates adjoints. A tape is built
/// per training step and discarded.
class Tape {
public:
    using NodeId = std::size_t;

    /// Arguments of log() are clamped below by this value.
    static constexpr double kLogFloor = 1e-12;

    /// Constant input; never receives a gradient.
    NodeId leaf(Tensor value) {
        return push(std::move(value), nullptr);
    }

    /// Trainable input. backward() writes the adjoint into tensor.grad().
    /// Registering the same tensor twice returns the same node, so shared
    /// parameters accumulate correctly.
    NodeId param(Tensor& tensor) {
        auto it = param_ids_.find(&tensor);
        if (it != param_ids_.end()) return it->second;
        NodeId id = push(tensor, nullptr);
        nodes_[id].external = &tensor;
        param_ids_.emplace(&tensor, id);
        return id;
    }

    NodeId matmul(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows()) {
            throw ShapeError("matmul: incompatible shapes");
        }
        const std::size_t n = ta.rows(), m = ta.cols(), p = tb.cols();
        Tensor out({n, p});
        const double* A = ta.values().data();
        const double* B = tb.values().data();
        double* Y = out.values().data();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < m; ++k) {
                const double aik = A[i * m + k];
                if (aik == 0.0) continue;
                const double* brow = B + k * p;
                double* yrow = Y + i * p;
                for (std::size_t j = 0; j < p; ++j) yrow[j] += aik * brow[j];
            }
        }
        return push(std::move(out), [a, b, n, m, p](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const double* A = t.value(a).values().data();
            const double* B = t.value(b).values().data();
            std::vector<double>& da = t.nodes_[a].grad;
            std::vector<double>& db = t.nodes_[b].grad;
            for (std::size_t i = 0; i < n; ++i) {
                const double* dyrow = dy.data() + i * p;
                for (std::size_t k = 0; k < m; ++k) {
                    const double* brow = B + k * p;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < p; ++j) acc += dyrow[j] * brow[j];
                    da[i * m + k] += acc;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double aik = A[i * m + k];
                    if (aik == 0.0) continue;
                    double* dbrow = db.data() + k * p;
                    for (std::size_t j = 0; j < p; ++j) dbrow[j] += aik * dyrow[j];
                }
            }
        });
    }

    /// Elementwise add; b may also be a 1 x m row broadcast over a's rows.
    NodeId add(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (ta.same_shape(tb)) {
            Tensor out = ta;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += tb[i];
            return push(std::move(out), [a, b](Tape& t, NodeId self) {
                const std::vector<double>& dy = t.nodes_[self].grad;
                std::vector<double>& da = t.nodes_[a].grad;
                std::vector<double>& db = t.nodes_[b].grad;
                for (std::size_t i = 0; i < dy.size(); ++i) {
                    da[i] += dy[i];
                    db[i] += dy[i];
                }
            });
        }
        if (ta.rank() == 2 && tb.rank() == 2 && tb.rows() == 1 && tb.cols() == ta.cols()) {
            const std::size_t n = ta.rows(), m = ta.cols();
            Tensor out = ta;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < m; ++j) out[i * m + j] += tb[j];
            }
            return push(std::move(out), [a, b, n, m](Tape& t, NodeId self) {
                const std::vector<double>& dy = t.nodes_[self].grad;
                std::vector<double>& da = t.nodes_[a].grad;
                std::vector<double>& db = t.nodes_[b].grad;
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < m; ++j) {
                        da[i * m + j] += dy[i * m + j];
                        db[j] += dy[i * m + j];
                    }
                }
            });
        }
        throw ShapeError("add: shapes must match (or rhs must be a bias row)");
    }

    NodeId sub(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (!ta.same_shape(tb)) throw ShapeError("sub: shapes must match");
        Tensor out = ta;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= tb[i];
        return push(std::move(out), [a, b](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            std::vector<double>& da = t.nodes_[a].grad;
            std::vector<double>& db = t.nodes_[b].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) {
                da[i] += dy[i];
                db[i] -= dy[i];
            }
        });
    }

    NodeId mul(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (!ta.same_shape(tb)) throw ShapeError("mul: shapes must match");
        Tensor out = ta;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= tb[i];
        return push(std::move(out), [a, b](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& ta = t.value(a);
            const Tensor& tb = t.value(b);
            std::vector<double>& da = t.nodes_[a].grad;
            std::vector<double>& db = t.nodes_[b].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) {
                da[i] += dy[i] * tb[i];
                db[i] += dy[i] * ta[i];
            }
        });
    }

    NodeId scale(NodeId a, double s) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
        return push(std::move(out), [a, s](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) da[i] += s * dy[i];
        });
    }

    NodeId relu(NodeId a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
        return push(std::move(out), [a](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& x = t.value(a);
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) {
                if (x[i] > 0.0) da[i] += dy[i];
            }
        });
    }

    NodeId lrelu(NodeId a, double slope) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] < 0.0) out[i] *= slope;
        }
        return push(std::move(out), [a, slope](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& x = t.value(a);
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) {
                da[i] += dy[i] * (x[i] > 0.0 ? 1.0 : slope);
            }
        });
    }

    NodeId tanh(NodeId a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
        return push(std::move(out), [a](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& y = t.value(self);
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * (1.0 - y[i] * y[i]);
        });
    }

    NodeId sigmoid(NodeId a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
        return push(std::move(out), [a](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& y = t.value(self);
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * y[i] * (1.0 - y[i]);
        });
    }

    /// Natural log with the argument clamped below by kLogFloor. In the
    /// clamped region the function is constant, so its derivative there is 0.
    NodeId log(NodeId a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = std::log(out[i] > kLogFloor ? out[i] : kLogFloor);
        }
        return push(std::move(out), [a](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& x = t.value(a);
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) {
                if (x[i] > kLogFloor) da[i] += dy[i] / x[i];
            }
        });
    }

    /// Row-wise softmax with max-shift; each output row sums to 1.
    NodeId softmax(NodeId a) {
        const Tensor& ta = value(a);
        if (ta.rank() != 2) throw ShapeError("softmax: rank-2 input required");
        const std::size_t n = ta.rows(), m = ta.cols();
        Tensor out({n, m});
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = ta.values().data() + i * m;
            double* y = out.values().data() + i * m;
            double mx = x[0];
            for (std::size_t j = 1; j < m; ++j) mx = std::max(mx, x[j]);
            double z = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                y[j] = std::exp(x[j] - mx);
                z += y[j];
            }
            for (std::size_t j = 0; j < m; ++j) y[j] /= z;
        }
        return push(std::move(out), [a, n, m](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& y = t.value(self);
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < n; ++i) {
                const double* yrow = y.values().data() + i * m;
                const double* grow = dy.data() + i * m;
                double dot = 0.0;
                for (std::size_t j = 0; j < m; ++j) dot += grow[j] * yrow[j];
                for (std::size_t j = 0; j < m; ++j) {
                    da[i * m + j] += yrow[j] * (grow[j] - dot);
                }
            }
        });
    }

    NodeId abs(NodeId a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(out[i]);
        return push(std::move(out), [a](Tape& t, NodeId self) {
            const std::vector<double>& dy = t.nodes_[self].grad;
            const Tensor& x = t.value(a);
            std::vector<double>& da = t.nodes_[a].grad;
            for (std::size_t i = 0; i < dy.size(); ++i) {
                da[i] += dy[i] * (x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0));
            }
        });
    }

    NodeId sum(NodeId a) {
        const Tensor& ta = value(a);
        double acc = 0.0;
        for (std::size_t i = 0; i < ta.size(); ++i) acc += ta[i];
        return push(Tensor::scalar(acc), [a](Tape& t, NodeId self) {
            const double g = t.nodes_[self].grad[0];
            std::vector<double>& da = t.nodes_[a].grad;
            for (double& d : da) d += g;
        });
    }

    NodeId mean(NodeId a) {
        const Tensor& ta = value(a);
        const double inv = 1.0 / static_cast<double>(ta.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < ta.size(); ++i) acc += ta[i];
        return push(Tensor::scalar(acc * inv), [a, inv](Tape& t, NodeId self) {
            const double g = t.nodes_[self].grad[0] * inv;
            std::vector<double>& da = t.nodes_[a].grad;
            for (double& d : da) d += g;
        });
    }

    /// Gather one column per row: out[i] = a[i][cols[i]], shape n x 1.
    NodeId pick(NodeId a, std::vector<std::size_t> cols) {
        const Tensor& ta = value(a);
        if (ta.rank() != 2) throw ShapeError("pick: rank-2 input required");
        if (cols.size() != ta.rows()) {
            throw ContractError("pick: one column index per row required");
        }
        const std::size_t n = ta.rows(), m = ta.cols();
        Tensor out({n, 1});
        for (std::size_t i = 0; i < n; ++i) {
            if (cols[i] >= m) throw ContractError("pick: column index out of range");
            out[i] = ta[i * m + cols[i]];
        }
        return push(std::move(out),
                    [a, cols = std::move(cols), m](Tape& t, NodeId self) {
                        const std::vector<double>& dy = t.nodes_[self].grad;
                        std::vector<double>& da = t.nodes_[a].grad;
                        for (std::size_t i = 0; i < dy.size(); ++i) {
                            da[i * m + cols[i]] += dy[i];
                        }
                    });
    }

    /// Rotate each row by its label; the adjoint is rotated back by the
    /// inverse label (rotations are orthogonal).
    NodeId rotate(NodeId a, std::vector<int> labels, SampleGeometry geom) {
        const Tensor& ta = value(a);
        if (ta.rank() != 2 || ta.cols() != geom.dim()) {
            throw ShapeError("rotate: batch rows must match sample geometry");
        }
        if (labels.size() != ta.rows()) {
            throw ContractError("rotate: one label per row required");
        }
        Tensor out = apply_rotations(ta, labels, geom);
        return push(std::move(out),
                    [a, labels = std::move(labels), geom](Tape& t, NodeId self) {
                        const std::vector<double>& dy = t.nodes_[self].grad;
                        std::vector<double>& da = t.nodes_[a].grad;
                        const std::size_t m = geom.dim();
                        std::vector<double> tmp(m);
                        for (std::size_t i = 0; i < labels.size(); ++i) {
                            rotate_sample(dy.data() + i * m, tmp.data(), geom,
                                          inverse_rotation(labels[i]));
                            for (std::size_t j = 0; j < m; ++j) da[i * m + j] += tmp[j];
                        }
                    });
    }

    const Tensor& value(NodeId id) const { return nodes_.at(id).value; }

    const std::vector<double>& grad(NodeId id) const {
        const Node& n = nodes_.at(id);
        if (n.grad.size() != n.value.size()) {
            throw ContractError("Tape: gradients not computed; call backward() first");
        }
        return n.grad;
    }

    double scalar_value(NodeId id) const {
        const Tensor& v = value(id);
        if (v.size() != 1) throw ContractError("Tape: node is not a scalar");
        return v[0];
    }

    /// Seed the loss adjoint with 1 and sweep the tape in reverse. Parameter
    /// leaves get their adjoints written into the registered tensors' grad
    /// buffers (overwriting previous contents).
    void backward(NodeId loss) {
        if (value(loss).size() != 1) {
            throw ContractError("backward: loss node must be scalar");
        }
        for (Node& n : nodes_) n.grad.assign(n.value.size(), 0.0);
        nodes_[loss].grad[0] = 1.0;
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            if (nodes_[i].back) nodes_[i].back(*this, i);
        }
        for (auto& [tensor, id] : param_ids_) {
            tensor->ensure_grad();
            tensor->grad() = nodes_[id].grad;
        }
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        std::vector<double> grad;
        std::function<void(Tape&, NodeId)> back;
        Tensor* external = nullptr;
    };

    NodeId push(Tensor value, std::function<void(Tape&, NodeId)> back) {
        NodeId id = nodes_.size();
        nodes_.push_back(Node{std::move(value), {}, std::move(back), nullptr});
        return id;
    }

    std::vector<Node> nodes_;
    std::unordered_map<Tensor*, NodeId> param_ids_;
};

}  // namespace msgl
