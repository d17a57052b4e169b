#include "ictal/network.hpp"

namespace ictal {

template <typename T>
Network<T>::Network(std::vector<std::unique_ptr<Layer<T>>> layers)
    : layers_(std::move(layers)) {}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& input, Mode mode, RngStream* rng) {
  activations_.clear();
  activations_.reserve(layers_.size() + 1);
  activations_.push_back(input);
  for (auto& layer : layers_) {
    activations_.push_back(layer->forward(activations_.back(), mode, rng));
  }
  return activations_.back();
}

template <typename T>
Tensor<T> Network<T>::predict(const Tensor<T>& input) {
  activations_.clear();
  Tensor<T> x = input;
  for (auto& layer : layers_) x = layer->forward(x, Mode::infer, nullptr);
  return x;
}

template <typename T>
Tensor<T> Network<T>::backward_range(std::size_t end, Tensor<T> grad) {
  if (activations_.size() != layers_.size() + 1) {
    throw Error(ErrorCode::missing_forward, "network backward without a recorded forward");
  }
  for (std::size_t i = end; i-- > 0;) {
    grad = layers_[i]->backward(activations_[i], grad);
  }
  return grad;
}

template <typename T>
Tensor<T> Network<T>::backward(const Tensor<T>& upstream) {
  return backward_range(layers_.size(), upstream);
}

template <typename T>
Tensor<T> Network<T>::backward_from_logits(const Tensor<T>& logit_grad) {
  if (layers_.empty() || layers_.back()->kind() != "sigmoid") {
    throw Error(ErrorCode::invalid_argument,
                "backward_from_logits needs a network ending in a sigmoid layer");
  }
  if (activations_.size() == layers_.size() + 1 &&
      logit_grad.shape() != activations_[layers_.size() - 1].shape()) {
    throw Error(ErrorCode::shape_mismatch, "logit gradient shape does not match logits");
  }
  return backward_range(layers_.size() - 1, logit_grad);
}

template <typename T>
std::vector<ParamView<T>> Network<T>::parameters() {
  std::vector<ParamView<T>> views;
  for (auto& layer : layers_) {
    auto lv = layer->parameters();
    views.insert(views.end(), std::make_move_iterator(lv.begin()),
                 std::make_move_iterator(lv.end()));
  }
  return views;
}

template <typename T>
ParameterSet<T> Network<T>::export_parameters() const {
  ParameterSet<T> out;
  // parameters() hands out mutable views; nothing is written through them here.
  for (const auto& view : const_cast<Network*>(this)->parameters()) {
    out.add(view.name, view.role, *view.value);
  }
  return out;
}

template <typename T>
void Network<T>::load_parameters(const ParameterSet<T>& params) {
  auto views = parameters();
  if (views.size() != params.size()) {
    throw Error(ErrorCode::corrupt_artifact,
                "parameter set has " + std::to_string(params.size()) + " entries, model needs " +
                    std::to_string(views.size()));
  }
  for (auto& view : views) {
    const auto* entry = params.find(view.name);
    if (entry == nullptr) {
      throw Error(ErrorCode::corrupt_artifact, "parameter set lacks " + view.name);
    }
    if (entry->role != view.role || entry->value.shape() != view.value->shape()) {
      throw Error(ErrorCode::corrupt_artifact,
                  "parameter " + view.name + " has shape " + to_string(entry->value.shape()) +
                      ", model needs " + to_string(view.value->shape()));
    }
    *view.value = entry->value;
  }
}

template <typename T>
std::vector<std::int64_t> Network<T>::routing_signature() const {
  std::vector<std::int64_t> sig;
  for (const auto& layer : layers_) layer->routing_signature(sig);
  return sig;
}

template class Network<float>;
template class Network<double>;

}  // namespace ictal
