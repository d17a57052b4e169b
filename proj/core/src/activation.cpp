#include "ictal/layers/activation.hpp"

#include <cmath>

namespace ictal {

template <typename T>
T sigmoid(T x) {
  if (x >= 0) return T{1} / (T{1} + std::exp(-x));
  const T e = std::exp(x);
  return e / (T{1} + e);
}

template float sigmoid<float>(float);
template double sigmoid<double>(double);

template <typename T>
Tensor<T> Relu<T>::forward(const Tensor<T>& input, Mode, RngStream*) {
  Tensor<T> out(input.shape());
  active_.resize(input.size());
  const T* __restrict x = input.data();
  T* __restrict y = out.data();
  std::uint8_t* __restrict on = active_.data();
  const std::size_t n = input.size();
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    on[i] = x[i] > T{0};
    y[i] = x[i] > T{0} ? x[i] : T{0};
  }
  this->record_forward(input.shape(), out.shape());
  return out;
}

template <typename T>
Tensor<T> Relu<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  Tensor<T> grad(input.shape());
  const T* __restrict dy = upstream.data();
  T* __restrict dx = grad.data();
  const std::uint8_t* __restrict on = active_.data();
  const std::size_t n = grad.size();
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) dx[i] = on[i] ? dy[i] : T{0};
  return grad;
}

template <typename T>
void Relu<T>::routing_signature(std::vector<std::int64_t>& out) const {
  out.insert(out.end(), active_.begin(), active_.end());
}

template <typename T>
Tensor<T> Sigmoid<T>::forward(const Tensor<T>& input, Mode, RngStream*) {
  Tensor<T> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = sigmoid(input[i]);
  output_.assign(out.values().begin(), out.values().end());
  this->record_forward(input.shape(), out.shape());
  return out;
}

template <typename T>
Tensor<T> Sigmoid<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  Tensor<T> grad(input.shape());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i] = upstream[i] * output_[i] * (T{1} - output_[i]);
  }
  return grad;
}

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& input, Mode, RngStream*) {
  if (input.rank() < 2) {
    throw Error(ErrorCode::shape_mismatch, "flatten needs a batch axis plus features");
  }
  const Shape flat{input.dim(0), input.size() / input.dim(0)};
  this->record_forward(input.shape(), flat);
  return input.reshaped(flat);
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  return upstream.reshaped(input.shape());
}

template class Relu<float>;
template class Relu<double>;
template class Sigmoid<float>;
template class Sigmoid<double>;
template class Flatten<float>;
template class Flatten<double>;

}  // namespace ictal
