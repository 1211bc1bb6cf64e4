#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "msgl/error.hpp"

namespace msgl {

/// Dense n-dimensional array of doubles with an optional gradient buffer.
/// Row-major storage; most of the library works with rank-2 (batch x features).
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(element_count(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> values)
        : shape_(std::move(shape)), data_(std::move(values)) {
        if (data_.size() != element_count(shape_)) {
            throw ShapeError("Tensor: value count " + std::to_string(data_.size()) +
                             " does not match shape product " +
                             std::to_string(element_count(shape_)));
        }
    }

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

    static Tensor full(std::vector<std::size_t> shape, double value) {
        Tensor t(std::move(shape));
        for (double& v : t.data_) v = value;
        return t;
    }

    static Tensor scalar(double value) { return Tensor({1}, {value}); }

    static Tensor row(std::vector<double> values) {
        std::size_t n = values.size();
        return Tensor({1, n}, std::move(values));
    }

    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
        return Tensor({rows, cols}, std::move(values));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    std::size_t rows() const { return dim(0); }
    std::size_t cols() const { return rank() >= 2 ? dim(1) : 1; }

    std::size_t dim(std::size_t i) const {
        if (i >= shape_.size()) {
            throw ShapeError("Tensor: dimension index out of range");
        }
        return shape_[i];
    }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool has_grad() const { return !grad_.empty(); }

    std::vector<double>& grad() {
        if (grad_.empty()) {
            throw ContractError("Tensor: gradient buffer not allocated");
        }
        return grad_;
    }

    const std::vector<double>& grad() const {
        if (grad_.empty()) {
            throw ContractError("Tensor: gradient buffer not allocated");
        }
        return grad_;
    }

    void ensure_grad() {
        if (grad_.empty()) grad_.assign(data_.size(), 0.0);
    }

    void zero_grad() {
        for (double& g : grad_) g = 0.0;
    }

    void drop_grad() { grad_.clear(); }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    static std::size_t element_count(const std::vector<std::size_t>& shape) {
        if (shape.empty()) return 0;
        std::size_t n = 1;
        for (std::size_t d : shape) {
            if (d == 0) throw ShapeError("Tensor: zero-sized dimension");
            n *= d;
        }
        return n;
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
    std::vector<double> grad_;
};

}  // namespace msgl
