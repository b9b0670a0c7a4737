#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "signglove/errors.hpp"

namespace signglove::nn {

// Dense n-dimensional array of doubles, C-order. All training math runs in
// 64-bit floats so finite-difference gradient checks have headroom.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), v_(numel_of(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> values)
        : shape_(std::move(shape)), v_(std::move(values)) {
        if (v_.size() != numel_of(shape_))
            throw ShapeMismatch("Tensor: value count does not match shape");
    }

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

    static Tensor full(std::vector<std::size_t> shape, double fill) {
        Tensor t(std::move(shape));
        for (double& x : t.v_) x = fill;
        return t;
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t numel() const { return v_.size(); }
    std::size_t dim(std::size_t i) const { return shape_[i]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    double& at(std::size_t i, std::size_t j) { return v_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return v_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return v_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return v_[(i * shape_[1] + j) * shape_[2] + k];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    void fill(double v) { std::fill(v_.begin(), v_.end(), v); }

    static std::size_t numel_of(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               std::multiplies<>());
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> v_;
};

}  // namespace signglove::nn
