#pragma once

#include "ictal/layers/layer.hpp"

namespace ictal {

/// Per-feature-map batch normalization over the batch and all spatial axes.
///
/// Train mode standardizes with the (biased) batch statistics and folds them
/// into the running estimates as running = (1 - momentum) * running +
/// momentum * batch. Infer mode reads only the running estimates, so a batch
/// of one is fine there.
template <typename T>
class BatchNorm final : public Layer<T> {
 public:
  static constexpr double kDefaultMomentum = 0.1;
  static constexpr double kDefaultEpsilon = 1e-5;

  BatchNorm(std::string name, std::size_t maps, double momentum = kDefaultMomentum,
            double epsilon = kDefaultEpsilon);

  std::string_view kind() const override { return "batchnorm"; }
  std::size_t maps() const { return gamma_.size(); }
  double momentum() const { return momentum_; }
  double epsilon() const { return epsilon_; }

  Tensor<T>& gamma() { return gamma_; }
  Tensor<T>& beta() { return beta_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }
  const Tensor<T>& gamma_grad() const { return gamma_grad_; }
  const Tensor<T>& beta_grad() const { return beta_grad_; }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;
  std::vector<ParamView<T>> parameters() override;

 private:
  double momentum_;
  double epsilon_;
  Tensor<T> gamma_, beta_, running_mean_, running_var_;
  Tensor<T> gamma_grad_, beta_grad_;

  Mode last_mode_ = Mode::infer;
  std::vector<T> normalized_;       // x-hat of the last train-mode forward
  std::vector<double> inv_std_;     // per map, for whichever mode ran last
};

extern template class BatchNorm<float>;
extern template class BatchNorm<double>;

}  // namespace ictal
