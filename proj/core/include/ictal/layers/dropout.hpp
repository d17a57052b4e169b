#pragma once

#include "ictal/layers/layer.hpp"

namespace ictal {

// Inverted dropout: in train mode each element is zeroed with probability
// `rate` and survivors are scaled by 1 / (1 - rate). Infer mode is identity.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  Dropout(std::string name, double rate);

  std::string_view kind() const override { return "dropout"; }
  double rate() const { return rate_; }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;

 private:
  double rate_;
  std::vector<T> mask_;  // empty means the last forward was an identity map
};

extern template class Dropout<float>;
extern template class Dropout<double>;

}  // namespace ictal
