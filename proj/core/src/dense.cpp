#include "ictal/layers/dense.hpp"

namespace ictal {

template <typename T>
Dense<T>::Dense(std::string name, Tensor<T> weights, Tensor<T> bias)
    : Layer<T>(std::move(name)), weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.rank() != 2 || bias_.shape() != Shape{weights_.dim(0)}) {
    throw Error(ErrorCode::shape_mismatch,
                "dense '" + this->name() + "': weights " + to_string(weights_.shape()) +
                    " and bias " + to_string(bias_.shape()) + " are inconsistent");
  }
  weights_grad_ = Tensor<T>(weights_.shape());
  bias_grad_ = Tensor<T>(bias_.shape());
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& input, Mode, RngStream*) {
  if (input.rank() != 2 || input.dim(1) != inputs()) {
    throw Error(ErrorCode::shape_mismatch,
                "dense '" + this->name() + "': input " + to_string(input.shape()) +
                    " does not match fan-in " + std::to_string(inputs()));
  }
  const std::size_t batch = input.dim(0);
  const std::size_t n_in = inputs();
  const std::size_t n_out = outputs();
  Tensor<T> out(Shape{batch, n_out});
  for (std::size_t b = 0; b < batch; ++b) {
    const T* x = input.data() + b * n_in;
    for (std::size_t o = 0; o < n_out; ++o) {
      const T* w = weights_.data() + o * n_in;
      T acc = 0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < n_in; ++i) acc += w[i] * x[i];
      out[b * n_out + o] = acc + bias_[o];
    }
  }
  this->record_forward(input.shape(), out.shape());
  return out;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  const std::size_t batch = input.dim(0);
  const std::size_t n_in = inputs();
  const std::size_t n_out = outputs();
  weights_grad_.fill(0);
  bias_grad_.fill(0);
  Tensor<T> grad(input.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    const T* x = input.data() + b * n_in;
    T* dx = grad.data() + b * n_in;
    for (std::size_t o = 0; o < n_out; ++o) {
      const T g = upstream[b * n_out + o];
      bias_grad_[o] += g;
      T* dw = weights_grad_.data() + o * n_in;
      const T* w = weights_.data() + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        dw[i] += g * x[i];
        dx[i] += g * w[i];
      }
    }
  }
  return grad;
}

template <typename T>
std::vector<ParamView<T>> Dense<T>::parameters() {
  return {{this->name() + ".weights", ParamRole::weight, &weights_, &weights_grad_},
          {this->name() + ".bias", ParamRole::bias, &bias_, &bias_grad_}};
}

template class Dense<float>;
template class Dense<double>;

}  // namespace ictal
