#include "duplication.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ictal/training.hpp"

namespace ictal::testing {

namespace {

double rel(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

struct Evaluation {
  double loss = 0.0;
  std::vector<Tensor<double>> grads;
};

Evaluation evaluate(Network<double>& net, const Tensor<double>& input,
                    const std::vector<std::uint8_t>& labels, ClassWeights weights) {
  Evaluation e;
  e.loss = compute_batch_gradients<double>(net, input, labels, weights, 1e-9, 1e-9, Mode::infer,
                                           nullptr, LossReduction::sum)
               .total();
  for (const auto& view : net.parameters()) {
    if (view.grad != nullptr) e.grads.push_back(*view.grad);
  }
  return e;
}

}  // namespace

DuplicationResult duplication_equivalence(Topology topology, const ElectrodeLayout& layout,
                                          const Tensor<float>& segments,
                                          const std::vector<std::uint8_t>& labels, unsigned k,
                                          std::uint64_t seed) {
  auto [spec, params] = build_topology(topology, layout, RngStream(seed));
  auto net = instantiate<double>(spec, params.cast<double>());

  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto weighted = evaluate(net, network_input<double>(segments, all, topology, layout), labels,
                                 ClassWeights{static_cast<double>(k), 1.0});

  std::vector<std::size_t> dup;
  std::vector<std::uint8_t> dup_labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const unsigned copies = labels[i] == 1 ? k : 1;
    for (unsigned c = 0; c < copies; ++c) {
      dup.push_back(i);
      dup_labels.push_back(labels[i]);
    }
  }
  const auto duplicated = evaluate(net, network_input<double>(segments, dup, topology, layout),
                                   dup_labels, ClassWeights{1.0, 1.0});

  DuplicationResult r;
  r.loss_weighted = weighted.loss;
  r.loss_duplicated = duplicated.loss;
  r.loss_rel_error = rel(weighted.loss, duplicated.loss);
  for (std::size_t t = 0; t < weighted.grads.size(); ++t) {
    const auto a = weighted.grads[t].values();
    const auto b = duplicated.grads[t].values();
    for (std::size_t i = 0; i < a.size(); ++i) {
      r.max_grad_rel_error = std::max(r.max_grad_rel_error, rel(a[i], b[i]));
      ++r.gradient_values;
    }
  }
  return r;
}

}  // namespace ictal::testing
