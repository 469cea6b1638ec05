// SPDX-License-Identifier: Apache-2.0
#include "tscc/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace tscc::ad {

namespace {

size_t shape_product(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw std::invalid_argument("Tensor: non-positive dimension");
        n *= static_cast<size_t>(d);
    }
    return n;
}

} // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    if (shape_.size() > 2) throw std::invalid_argument("Tensor: rank > 2 unsupported");
    values_.assign(shape_product(shape_), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_.size() > 2) throw std::invalid_argument("Tensor: rank > 2 unsupported");
    if (values_.size() != shape_product(shape_)) {
        throw std::invalid_argument("Tensor: value count does not match shape product");
    }
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::vector(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return Tensor({n}, std::move(v));
}

Tensor Tensor::matrix(int rows, int cols, std::vector<double> v) {
    return Tensor({rows, cols}, std::move(v));
}

Tensor Tensor::zeros_like(const Tensor& t) { return Tensor(t.shape_); }

double Tensor::item() const {
    if (!is_scalar()) throw std::invalid_argument("Tensor::item: not a scalar");
    return values_[0];
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

} // namespace tscc::ad
