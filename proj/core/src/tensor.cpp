#include "blindguard/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "blindguard/errors.hpp"

namespace blindguard {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

namespace {

void check_dims(const Shape& shape) {
  for (auto d : shape) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + to_string(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_dims(shape_);
  values_.assign(element_count(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  check_dims(shape_);
  if (element_count(shape_) != values_.size()) {
    throw DimensionError("shape " + to_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) + " values, got " +
                         std::to_string(values_.size()));
  }
}

Tensor::Tensor(Shape shape, std::initializer_list<double> values)
    : Tensor(std::move(shape), std::vector<double>(values)) {}

Tensor Tensor::scalar(double value) { return Tensor({1}, std::vector<double>{value}); }

Tensor Tensor::filled(Shape shape, double value) {
  Tensor t(std::move(shape));
  std::fill(t.values_.begin(), t.values_.end(), value);
  return t;
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " + to_string(shape_));
  }
  return shape_[axis];
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw ContractError("item() on tensor of shape " + to_string(shape_));
  }
  return values_[0];
}

Tensor Tensor::reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(Shape shape) && {
  if (element_count(shape) != values_.size()) {
    throw DimensionError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  }
  return Tensor(std::move(shape), std::move(values_));
}

Tensor Tensor::slice_rows(std::size_t begin, std::size_t end) const {
  if (shape_.empty() || begin >= end || end > shape_[0]) {
    throw IndexError("row slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of range for " + to_string(shape_));
  }
  const std::size_t row = values_.size() / shape_[0];
  Shape shape = shape_;
  shape[0] = end - begin;
  std::vector<double> values(values_.begin() + static_cast<std::ptrdiff_t>(begin * row),
                             values_.begin() + static_cast<std::ptrdiff_t>(end * row));
  return Tensor(std::move(shape), std::move(values));
}

Tensor gather_rows(const Tensor& source, std::span<const std::size_t> indices) {
  if (source.rank() == 0 || indices.empty()) {
    throw ContractError("gather_rows needs a non-empty index list");
  }
  const std::size_t rows = source.dim(0);
  const std::size_t row = source.size() / rows;
  Shape shape = source.shape();
  shape[0] = indices.size();
  Tensor out(shape);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows) throw IndexError("row index out of range");
    std::memcpy(out.data() + i * row, source.data() + indices[i] * row, row * sizeof(double));
  }
  return out;
}

double max_abs_difference(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace blindguard
