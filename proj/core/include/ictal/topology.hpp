#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ictal/layout.hpp"
#include "ictal/network.hpp"
#include "ictal/rng.hpp"

namespace ictal {

enum class Topology { nv1x16, nv4x4, nv2x2x4 };

std::string_view to_string(Topology topology);
Topology parse_topology(std::string_view name);

inline constexpr std::size_t kSegmentChannels = 16;
inline constexpr std::size_t kSegmentSamples = 3000;

enum class LayerKind { batchnorm, conv, relu, maxpool, flatten, dropout, dense, sigmoid };
std::string_view to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind;
  std::string name;
  Shape extents;             // conv kernel or pool window, per spatial axis
  std::size_t maps_in = 0;   // conv/dense fan-in maps or units; batchnorm maps
  std::size_t maps_out = 0;  // conv/dense output maps or units
  double rate = 0.0;         // dropout
};

struct ParameterShape {
  std::string name;
  ParamRole role;
  Shape shape;
};

/// Declarative layer stack for one topology. The input shape excludes the
/// batch axis: (1 map, spatial grid..., 3000 samples).
struct ModelSpec {
  Topology topology;
  Shape input_shape;
  std::vector<LayerSpec> layers;

  std::vector<ParameterShape> parameter_manifest() const;
  // Output shape of every layer (without batch axis), derived by walking the
  // stack. Throws if a pool window does not divide its input.
  std::vector<Shape> activation_shapes() const;
};

// Grid the 16 channels are arranged on: (16), (4, 4) or (2, 2, 4).
Shape electrode_grid(Topology topology);

// Pure: the stack does not depend on the seed. Rejects nv2x2x4 when the
// layout carries no hemisphere assignment.
ModelSpec make_model_spec(Topology topology, const ElectrodeLayout& layout);

// Glorot-uniform weights, zero biases, unit gamma, zero beta, running stats
// (0, 1). Each array draws from rng.split(<parameter name>).
ParameterSet<float> init_parameters(const ModelSpec& spec, const RngStream& rng);

std::pair<ModelSpec, ParameterSet<float>> build_topology(Topology topology,
                                                         const ElectrodeLayout& layout,
                                                         const RngStream& rng);

template <typename T>
Network<T> instantiate(const ModelSpec& spec, const ParameterSet<T>& params);

/// Rearranges one (16, 3000) segment onto the topology's electrode grid:
/// (16, 3000), (4, 4, 3000) or (2, 2, 4, 3000). Values are only permuted.
template <typename T>
Tensor<T> reshape_segment(const Tensor<float>& segment, Topology topology,
                          const ElectrodeLayout& layout);

// Inverse of reshape_segment back to (16, 3000) channel order.
template <typename T>
Tensor<float> unreshape_segment(const Tensor<T>& grid, Topology topology,
                                const ElectrodeLayout& layout);

/// Gathers `indices` from an (n, 16, 3000) segment tensor into a network
/// input batch (k, 1, grid..., 3000).
template <typename T>
Tensor<T> network_input(const Tensor<float>& segments, std::span<const std::size_t> indices,
                        Topology topology, const ElectrodeLayout& layout);

}  // namespace ictal
