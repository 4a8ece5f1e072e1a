#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace blindguard {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major array of 64-bit floats.
///
/// Tensors are plain values. Gradient bookkeeping lives on the Graph that
/// records operations over them (see autodiff.hpp).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);
  Tensor(Shape shape, std::initializer_list<double> values);

  static Tensor scalar(double value);
  static Tensor filled(Shape shape, double value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Value of a single-element tensor.
  double item() const;

  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  /// Rows [begin, end) along axis 0.
  Tensor slice_rows(std::size_t begin, std::size_t end) const;

  std::vector<double> release() && { return std::move(values_); }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

/// Stacks the rows selected by `indices` (axis 0) into a new tensor.
Tensor gather_rows(const Tensor& source, std::span<const std::size_t> indices);

double max_abs_difference(const Tensor& a, const Tensor& b);

}  // namespace blindguard
