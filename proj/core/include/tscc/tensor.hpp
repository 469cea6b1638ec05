// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace tscc::ad {

/// Dense real tensor of rank 0, 1 or 2, row-major doubles.
class Tensor {
public:
    Tensor() = default;

    /// Zeros of the given shape.
    explicit Tensor(std::vector<int> shape);
    Tensor(std::vector<int> shape, std::vector<double> values);

    static Tensor scalar(double v);
    static Tensor vector(std::vector<double> v);
    static Tensor matrix(int rows, int cols, std::vector<double> v);
    static Tensor zeros_like(const Tensor& t);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int size() const { return static_cast<int>(values_.size()); }

    bool is_scalar() const { return shape_.empty(); }
    bool is_vector() const { return shape_.size() == 1; }
    bool is_matrix() const { return shape_.size() == 2; }

    /// Rows/cols of a matrix; a vector counts as 1 x n.
    int rows() const { return is_matrix() ? shape_[0] : 1; }
    int cols() const {
        if (is_matrix()) return shape_[1];
        if (is_vector()) return shape_[0];
        return 1;
    }

    double item() const;  // scalar value; rejects non-scalars

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

private:
    std::vector<int> shape_;
    std::vector<double> values_;
};

} // namespace tscc::ad
