#include "ictal/layers/dropout.hpp"

namespace ictal {

template <typename T>
Dropout<T>::Dropout(std::string name, double rate) : Layer<T>(std::move(name)), rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "dropout '" + this->name() + "': rate must lie in [0, 1)");
  }
}

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& input, Mode mode, RngStream* rng) {
  this->record_forward(input.shape(), input.shape());
  mask_.clear();
  if (mode == Mode::infer || rate_ == 0.0) return input;
  if (rng == nullptr) {
    throw Error(ErrorCode::invalid_argument,
                "dropout '" + this->name() + "': train mode needs a random stream");
  }
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
  mask_.resize(input.size());
  Tensor<T> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) {
    mask_[i] = rng->uniform() < rate_ ? T{0} : keep_scale;
    out[i] = input[i] * mask_[i];
  }
  return out;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  if (mask_.empty()) return upstream;
  Tensor<T> grad(upstream.shape());
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = upstream[i] * mask_[i];
  return grad;
}

template class Dropout<float>;
template class Dropout<double>;

}  // namespace ictal
