#pragma once

#include "ictal/layers/layer.hpp"

namespace ictal {

/// "Same"-padded cross-correlation over every spatial axis.
///
///   out[f, x] = bias[f] + sum_g sum_d kernel[f, g, d] * input[g, x + d - (k - 1) / 2]
///
/// Out-of-range input reads are zero. For even extents the kernel therefore
/// reaches one tap further toward larger indices. The last spatial axis is
/// the time axis and is processed as contiguous rows.
template <typename T>
class Conv final : public Layer<T> {
 public:
  static constexpr std::size_t kMaxExtent = 5;

  // kernel: (maps_out, maps_in, k_1, ..., k_D); bias: (maps_out).
  Conv(std::string name, Tensor<T> kernel, Tensor<T> bias);

  std::string_view kind() const override { return "conv"; }
  std::size_t maps_in() const { return kernel_.dim(1); }
  std::size_t maps_out() const { return kernel_.dim(0); }
  std::size_t spatial_rank() const { return kernel_.rank() - 2; }
  Shape extents() const { return Shape(kernel_.shape().begin() + 2, kernel_.shape().end()); }

  const Tensor<T>& kernel() const { return kernel_; }
  const Tensor<T>& bias() const { return bias_; }
  const Tensor<T>& kernel_grad() const { return kernel_grad_; }
  const Tensor<T>& bias_grad() const { return bias_grad_; }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, RngStream* rng) override;
  Tensor<T> backward(const Tensor<T>& input, const Tensor<T>& upstream) override;
  std::vector<ParamView<T>> parameters() override;

 private:
  void check_input(const Tensor<T>& input) const;

  Tensor<T> kernel_;
  Tensor<T> bias_;
  Tensor<T> kernel_grad_;
  Tensor<T> bias_grad_;
};

extern template class Conv<float>;
extern template class Conv<double>;

}  // namespace ictal
