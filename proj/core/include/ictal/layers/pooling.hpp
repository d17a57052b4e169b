#pragma once

#include "ictal/layers/layer.hpp"

namespace ictal {

/// Non-overlapping max pooling. Each spatial extent must be divisible by its
/// window extent. Ties resolve to the lowest input index, and backward routes
/// each upstream element to that stored position.
template <typename T>
class MaxPool final : public Layer<T> {
 public:
  MaxPool(std::string name, Shape window);

  std::string_view kind() const override { return "maxpool"; }
  const Shape& window() const { return window_; }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;
  void routing_signature(std::vector<std::int64_t>& out) const override;

 private:
  Shape window_;
  std::vector<std::size_t> argmax_;
};

extern template class MaxPool<float>;
extern template class MaxPool<double>;

}  // namespace ictal
