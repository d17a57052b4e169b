#include "ictal/init.hpp"

#include <cmath>

namespace ictal {

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
  if (fan_in == 0 || fan_out == 0) {
    throw Error(ErrorCode::invalid_argument, "glorot_uniform: fan_in and fan_out must be >= 1");
  }
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <typename T>
Tensor<T> glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out,
                         RngStream& rng) {
  const double limit = glorot_limit(fan_in, fan_out);
  Tensor<T> out(std::move(shape));
  for (auto& v : out.values()) {
    v = static_cast<T>(rng.uniform(-limit, limit));
    // narrowing to float may round past the bound
    if (std::abs(static_cast<double>(v)) > limit) v = std::nextafter(v, T{0});
  }
  return out;
}

template Tensor<float> glorot_uniform<float>(Shape, std::size_t, std::size_t, RngStream&);
template Tensor<double> glorot_uniform<double>(Shape, std::size_t, std::size_t, RngStream&);

}  // namespace ictal
