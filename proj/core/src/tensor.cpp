#include "pivotmt/tensor.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "pivotmt/error.hpp"

namespace pivotmt {
namespace {

std::atomic<Precision> g_precision{Precision::f32};

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void check_shape(const Shape& shape) {
  if (shape.empty()) {
    throw DimensionError("tensor: shape must have at least one dimension");
  }
  for (std::size_t d : shape) {
    if (d == 0) {
      throw DimensionError("tensor: dimension sizes must be positive, got " + shape_string(shape));
    }
  }
}

}  // namespace

Precision precision() noexcept { return g_precision.load(std::memory_order_relaxed); }

void set_precision(Precision p) noexcept { g_precision.store(p, std::memory_order_relaxed); }

double round_to_precision(double v) noexcept {
  return precision() == Precision::f32 ? static_cast<double>(static_cast<float>(v)) : v;
}

PrecisionScope::PrecisionScope(Precision p) noexcept : saved_(precision()) { set_precision(p); }

PrecisionScope::~PrecisionScope() { set_precision(saved_); }

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(element_count(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (element_count(shape_) != data_.size()) {
    throw DimensionError("tensor: shape " + shape_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) + " values, got " +
                         std::to_string(data_.size()));
  }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
  return Tensor({rows, cols}, fill);
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("tensor: ragged rows in from_rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

Tensor Tensor::row_vector(std::span<const double> values) {
  return Tensor({1, values.size()}, std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::scalar(double v) { return Tensor({1, 1}, std::vector<double>{v}); }

std::size_t Tensor::rows() const noexcept { return shape_.size() >= 2 ? shape_[0] : 1; }

std::size_t Tensor::cols() const noexcept { return shape_.empty() ? 0 : shape_.back(); }

std::span<double> Tensor::row(std::size_t r) noexcept {
  return std::span<double>(data_).subspan(r * cols(), cols());
}

std::span<const double> Tensor::row(std::size_t r) const noexcept {
  return std::span<const double>(data_).subspan(r * cols(), cols());
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ContractError("tensor: item() on tensor of shape " + shape_string(shape_));
  }
  return data_[0];
}

void Tensor::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

void Tensor::round_to_precision() noexcept {
  if (precision() != Precision::f32) return;
  for (double& v : data_) v = static_cast<double>(static_cast<float>(v));
}

bool Tensor::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double l2_norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace pivotmt
