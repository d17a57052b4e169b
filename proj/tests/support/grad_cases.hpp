#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ictal/network.hpp"

namespace ictal::testing {

/// One randomly instantiated gradient-check problem: a 64-bit network, an
/// input batch, and the weights of the scalar objective sum(weights * out).
struct GradCase {
  std::string kind;
  Network<double> net;
  Tensor<double> input;
  Tensor<double> weights;
  Mode mode = Mode::train;
  std::uint64_t dropout_seed = 0;
};

// conv1d, conv2d, conv3d, maxpool, batchnorm_train, batchnorm_infer,
// dropout, dense, relu, sigmoid, flatten, stack.
const std::vector<std::string>& grad_case_kinds();

GradCase make_grad_case(const std::string& kind, std::uint64_t seed);

}  // namespace ictal::testing
