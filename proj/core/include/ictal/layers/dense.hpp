#pragma once

#include "ictal/layers/layer.hpp"

namespace ictal {

// Fully connected map out = W * x + b on (batch, n_in) inputs.
template <typename T>
class Dense final : public Layer<T> {
 public:
  // weights: (n_out, n_in); bias: (n_out).
  Dense(std::string name, Tensor<T> weights, Tensor<T> bias);

  std::string_view kind() const override { return "dense"; }
  std::size_t inputs() const { return weights_.dim(1); }
  std::size_t outputs() const { return weights_.dim(0); }

  const Tensor<T>& weights() const { return weights_; }
  const Tensor<T>& weights_grad() const { return weights_grad_; }
  const Tensor<T>& bias_grad() const { return bias_grad_; }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;
  std::vector<ParamView<T>> parameters() override;

 private:
  Tensor<T> weights_, bias_;
  Tensor<T> weights_grad_, bias_grad_;
};

extern template class Dense<float>;
extern template class Dense<double>;

}  // namespace ictal
