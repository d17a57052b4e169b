#pragma once

#include <cstddef>

#include "ictal/rng.hpp"
#include "ictal/tensor.hpp"

namespace ictal {

// Uniform on [-L, L] with L = sqrt(6 / (fan_in + fan_out)).
double glorot_limit(std::size_t fan_in, std::size_t fan_out);

template <typename T>
Tensor<T> glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out,
                         RngStream& rng);

}  // namespace ictal
