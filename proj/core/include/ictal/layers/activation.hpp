#pragma once

#include "ictal/layers/layer.hpp"

namespace ictal {

template <typename T>
T sigmoid(T x);

template <typename T>
class Relu final : public Layer<T> {
 public:
  using Layer<T>::Layer;
  std::string_view kind() const override { return "relu"; }
  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;
  void routing_signature(std::vector<std::int64_t>& out) const override;

 private:
  std::vector<std::uint8_t> active_;
};

template <typename T>
class Sigmoid final : public Layer<T> {
 public:
  using Layer<T>::Layer;
  std::string_view kind() const override { return "sigmoid"; }
  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;

 private:
  std::vector<T> output_;
};

// (batch, d1, ..., dk) -> (batch, d1 * ... * dk); order preserved.
template <typename T>
class Flatten final : public Layer<T> {
 public:
  using Layer<T>::Layer;
  std::string_view kind() const override { return "flatten"; }
  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;
};

extern template class Relu<float>;
extern template class Relu<double>;
extern template class Sigmoid<float>;
extern template class Sigmoid<double>;
extern template class Flatten<float>;
extern template class Flatten<double>;

}  // namespace ictal
