#include "ictal/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace ictal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::missing_forward: return "backward without recorded forward";
    case ErrorCode::io_error: return "i/o error";
    case ErrorCode::bad_magic: return "bad magic";
    case ErrorCode::unsupported_version: return "unsupported version";
    case ErrorCode::truncated_payload: return "truncated payload";
    case ErrorCode::invalid_layout: return "invalid layout";
    case ErrorCode::layout_mismatch: return "layout mismatch";
    case ErrorCode::invalid_manifest: return "invalid manifest";
    case ErrorCode::unknown_subject: return "unknown subject";
    case ErrorCode::config_error: return "configuration error";
    case ErrorCode::degenerate_training_set: return "degenerate training set";
    case ErrorCode::single_class: return "single class";
    case ErrorCode::non_finite_loss: return "non-finite loss";
    case ErrorCode::corrupt_artifact: return "corrupt artifact";
  }
  return "unknown error";
}

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ')';
  return out.str();
}

std::vector<std::size_t> row_major_strides(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * shape[i];
  }
  return strides;
}

namespace {

void check_shape(const Shape& shape) {
  for (auto extent : shape) {
    if (extent == 0) {
      throw Error(ErrorCode::invalid_argument,
                  "tensor axis lengths must be positive, got " + to_string(shape));
    }
  }
}

}  // namespace

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {
  check_shape(shape_);
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (element_count(shape_) != data_.size()) {
    throw Error(ErrorCode::shape_mismatch,
                "tensor of shape " + to_string(shape_) + " needs " +
                    std::to_string(element_count(shape_)) + " values, got " +
                    std::to_string(data_.size()));
  }
}

template <typename T>
std::size_t Tensor<T>::offset(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw Error(ErrorCode::shape_mismatch, "index rank does not match tensor rank");
  }
  std::size_t flat = 0;
  for (std::size_t axis = 0; axis < index.size(); ++axis) {
    if (index[axis] >= shape_[axis]) {
      throw Error(ErrorCode::invalid_argument, "tensor index out of range");
    }
    flat = flat * shape_[axis] + index[axis];
  }
  return flat;
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(Shape shape) const& {
  return Tensor(std::move(shape), data_);
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(Shape shape) && {
  return Tensor(std::move(shape), std::move(data_));
}

template <typename T>
void Tensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
void Tensor<T>::require_same_shape(const Tensor& other, const char* op) const {
  if (shape_ != other.shape_) {
    throw Error(ErrorCode::shape_mismatch, std::string("tensor ") + op + ": " +
                                               to_string(shape_) + " vs " +
                                               to_string(other.shape_));
  }
}

template <typename T>
Tensor<T>& Tensor<T>::operator+=(const Tensor& other) {
  require_same_shape(other, "+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

template <typename T>
Tensor<T>& Tensor<T>::operator-=(const Tensor& other) {
  require_same_shape(other, "-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

template <typename T>
Tensor<T>& Tensor<T>::operator*=(const Tensor& other) {
  require_same_shape(other, "*=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] *= other.data_[i];
  return *this;
}

template <typename T>
Tensor<T>& Tensor<T>::operator*=(T scalar) {
  for (auto& v : data_) v *= scalar;
  return *this;
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace ictal
