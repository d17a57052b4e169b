#include "ictal/layers/batch_norm.hpp"

#include <cmath>

namespace ictal {

namespace {

template <typename T>
double row_sum(const T* x, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

template <typename T>
double row_sq_dev(const T* x, std::size_t n, double mean) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mean) * (x[i] - mean);
  return acc;
}

template <typename T>
double row_dot(const T* a, const T* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

}  // namespace

template <typename T>
BatchNorm<T>::BatchNorm(std::string name, std::size_t maps, double momentum, double epsilon)
    : Layer<T>(std::move(name)),
      momentum_(momentum),
      epsilon_(epsilon),
      gamma_(Shape{maps}, T{1}),
      beta_(Shape{maps}, T{0}),
      running_mean_(Shape{maps}, T{0}),
      running_var_(Shape{maps}, T{1}),
      gamma_grad_(Shape{maps}),
      beta_grad_(Shape{maps}) {
  if (!(momentum > 0.0 && momentum < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "batchnorm momentum must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "batchnorm epsilon must be positive");
  }
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& input, Mode mode, RngStream*) {
  if (input.rank() < 2 || input.dim(1) != maps()) {
    throw Error(ErrorCode::shape_mismatch, "batchnorm '" + this->name() + "': input " +
                                               to_string(input.shape()) + " vs " +
                                               std::to_string(maps()) + " maps");
  }
  const std::size_t batch = input.dim(0);
  const std::size_t c_maps = maps();
  const std::size_t plane = input.size() / (batch * c_maps);
  Tensor<T> out(input.shape());
  inv_std_.assign(c_maps, 0.0);
  last_mode_ = mode;

  if (mode == Mode::train) {
    if (batch < 2) {
      throw Error(ErrorCode::invalid_argument,
                  "batchnorm '" + this->name() + "': train mode needs a batch of at least 2");
    }
    normalized_.resize(input.size());
    const double count = static_cast<double>(batch * plane);
    for (std::size_t c = 0; c < c_maps; ++c) {
      double sum = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        sum += row_sum(input.data() + (b * c_maps + c) * plane, plane);
      }
      const double mean = sum / count;
      double sq = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        sq += row_sq_dev(input.data() + (b * c_maps + c) * plane, plane, mean);
      }
      const double var = sq / count;
      const double inv_std = 1.0 / std::sqrt(var + epsilon_);
      inv_std_[c] = inv_std;
      const T scale = gamma_[c];
      const T shift = beta_[c];
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t base = (b * c_maps + c) * plane;
        const T* x = input.data() + base;
        T* xhat = normalized_.data() + base;
        T* y = out.data() + base;
        const T m = static_cast<T>(mean);
        const T s = static_cast<T>(inv_std);
        for (std::size_t i = 0; i < plane; ++i) {
          xhat[i] = (x[i] - m) * s;
          y[i] = scale * xhat[i] + shift;
        }
      }
      running_mean_[c] = static_cast<T>((1.0 - momentum_) * running_mean_[c] + momentum_ * mean);
      running_var_[c] = static_cast<T>((1.0 - momentum_) * running_var_[c] + momentum_ * var);
    }
  } else {
    normalized_.clear();
    for (std::size_t c = 0; c < c_maps; ++c) {
      const double inv_std = 1.0 / std::sqrt(static_cast<double>(running_var_[c]) + epsilon_);
      inv_std_[c] = inv_std;
      const T s = static_cast<T>(gamma_[c] * inv_std);
      const T shift = static_cast<T>(beta_[c] - running_mean_[c] * gamma_[c] * inv_std);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t base = (b * c_maps + c) * plane;
        const T* x = input.data() + base;
        T* y = out.data() + base;
        for (std::size_t i = 0; i < plane; ++i) y[i] = x[i] * s + shift;
      }
    }
  }
  this->record_forward(input.shape(), out.shape());
  return out;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  const std::size_t batch = input.dim(0);
  const std::size_t c_maps = maps();
  const std::size_t plane = input.size() / (batch * c_maps);
  Tensor<T> grad(input.shape());

  for (std::size_t c = 0; c < c_maps; ++c) {
    double dbeta = 0.0;
    double dgamma = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t base = (b * c_maps + c) * plane;
      const T* dy = upstream.data() + base;
      if (last_mode_ == Mode::train) {
        dbeta += row_sum(dy, plane);
        dgamma += row_dot(dy, normalized_.data() + base, plane);
      } else {
        const T* x = input.data() + base;
        const double mean = running_mean_[c];
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (std::size_t i = 0; i < plane; ++i) acc += static_cast<double>(dy[i]) * (x[i] - mean);
        dbeta += row_sum(dy, plane);
        dgamma += acc * inv_std_[c];
      }
    }
    beta_grad_[c] = static_cast<T>(dbeta);
    gamma_grad_[c] = static_cast<T>(dgamma);

    if (last_mode_ == Mode::train) {
      // dx = gamma * inv_std / M * (M * dy - sum(dy) - xhat * sum(dy * xhat))
      const double count = static_cast<double>(batch * plane);
      const T k = static_cast<T>(gamma_[c] * inv_std_[c]);
      const T mean_dy = static_cast<T>(dbeta / count);
      const T mean_dy_xhat = static_cast<T>(dgamma / count);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t base = (b * c_maps + c) * plane;
        const T* dy = upstream.data() + base;
        const T* xhat = normalized_.data() + base;
        T* dx = grad.data() + base;
        for (std::size_t i = 0; i < plane; ++i) {
          dx[i] = k * (dy[i] - mean_dy - xhat[i] * mean_dy_xhat);
        }
      }
    } else {
      const T k = static_cast<T>(gamma_[c] * inv_std_[c]);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t base = (b * c_maps + c) * plane;
        const T* dy = upstream.data() + base;
        T* dx = grad.data() + base;
        for (std::size_t i = 0; i < plane; ++i) dx[i] = k * dy[i];
      }
    }
  }
  return grad;
}

template <typename T>
std::vector<ParamView<T>> BatchNorm<T>::parameters() {
  return {{this->name() + ".gamma", ParamRole::bn_scale, &gamma_, &gamma_grad_},
          {this->name() + ".beta", ParamRole::bn_shift, &beta_, &beta_grad_},
          {this->name() + ".running_mean", ParamRole::running_mean, &running_mean_, nullptr},
          {this->name() + ".running_var", ParamRole::running_var, &running_var_, nullptr}};
}

template class BatchNorm<float>;
template class BatchNorm<double>;

}  // namespace ictal
