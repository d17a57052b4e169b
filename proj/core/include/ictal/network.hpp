#pragma once

#include <memory>
#include <vector>

#include "ictal/layers/activation.hpp"
#include "ictal/layers/batch_norm.hpp"
#include "ictal/layers/conv.hpp"
#include "ictal/layers/dense.hpp"
#include "ictal/layers/dropout.hpp"
#include "ictal/layers/layer.hpp"
#include "ictal/layers/pooling.hpp"
#include "ictal/parameters.hpp"

namespace ictal {

/// Ordered layer stack. forward() keeps every intermediate activation so that
/// backward() can hand each layer the input it saw; predict() runs inference
/// without retaining them.
template <typename T>
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<std::unique_ptr<Layer<T>>> layers);

  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  std::size_t size() const noexcept { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng = nullptr);
  Tensor<T> predict(const Tensor<T>& input);

  // Gradient w.r.t. the network input; parameter gradients land in the layers.
  Tensor<T> backward(const Tensor<T>& upstream);
  // Starts from d(loss)/d(logit) for a stack ending in Sigmoid, skipping the
  // sigmoid derivative (which underflows for saturated outputs).
  Tensor<T> backward_from_logits(const Tensor<T>& logit_grad);

  void release_activations() { activations_.clear(); }

  std::vector<ParamView<T>> parameters();
  ParameterSet<T> export_parameters() const;
  // Every view must be present in `params` with the same shape and role.
  void load_parameters(const ParameterSet<T>& params);

  std::vector<std::int64_t> routing_signature() const;

 private:
  Tensor<T> backward_range(std::size_t end, Tensor<T> grad);

  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::vector<Tensor<T>> activations_;  // [0] input, [i + 1] output of layer i
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace ictal
