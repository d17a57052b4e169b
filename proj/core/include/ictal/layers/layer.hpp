#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ictal/parameters.hpp"
#include "ictal/rng.hpp"
#include "ictal/tensor.hpp"

namespace ictal {

enum class Mode { train, infer };

/// Mutable handle on one parameter array owned by a layer. `grad` is null for
/// non-trainable state such as batch-norm running statistics.
template <typename T>
struct ParamView {
  std::string name;
  ParamRole role;
  Tensor<T>* value;
  Tensor<T>* grad;
};

/// Differentiable layer over batch-first tensors (batch, maps, spatial...).
///
/// backward() takes the same input that was given to the most recent
/// forward() plus the gradient of the loss w.r.t. that forward's output. It
/// returns the input gradient and overwrites the layer's parameter gradients.
template <typename T>
class Layer {
 public:
  explicit Layer(std::string name) : name_(std::move(name)) {}
  virtual ~Layer() = default;

  Layer(const Layer&) = delete;
  Layer& operator=(const Layer&) = delete;

  const std::string& name() const noexcept { return name_; }
  virtual std::string_view kind() const = 0;

  virtual Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) = 0;
  virtual Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) = 0;

  virtual std::vector<ParamView<T>> parameters() { return {}; }

  // Discrete routing decisions of the last forward (ReLU signs, pool argmax).
  // Gradient checks use it to detect perturbations that cross a kink.
  virtual void routing_signature(std::vector<std::int64_t>& /*out*/) const {}

 protected:
  void record_forward(const Shape& input, const Shape& output) {
    recorded_input_ = input;
    recorded_output_ = output;
  }
  void check_backward(const Tensor<T>& input, const Tensor<T>& upstream) const;

 private:
  std::string name_;
  std::optional<Shape> recorded_input_;
  std::optional<Shape> recorded_output_;
};

template <typename T>
void Layer<T>::check_backward(const Tensor<T>& input, const Tensor<T>& upstream) const {
  if (!recorded_input_) {
    throw Error(ErrorCode::missing_forward,
                std::string(kind()) + " '" + name_ + "': backward before any forward");
  }
  if (input.shape() != *recorded_input_) {
    throw Error(ErrorCode::missing_forward,
                std::string(kind()) + " '" + name_ + "': backward input " +
                    to_string(input.shape()) + " does not match recorded forward " +
                    to_string(*recorded_input_));
  }
  if (upstream.shape() != *recorded_output_) {
    throw Error(ErrorCode::shape_mismatch,
                std::string(kind()) + " '" + name_ + "': upstream gradient " +
                    to_string(upstream.shape()) + " does not match output " +
                    to_string(*recorded_output_));
  }
}

}  // namespace ictal
