#include "ictal/topology.hpp"

#include <algorithm>
#include <cstring>

#include "ictal/init.hpp"

namespace ictal {

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::nv1x16: return "nv1x16";
    case Topology::nv4x4: return "nv4x4";
    case Topology::nv2x2x4: return "nv2x2x4";
  }
  return "?";
}

Topology parse_topology(std::string_view name) {
  if (name == "nv1x16") return Topology::nv1x16;
  if (name == "nv4x4") return Topology::nv4x4;
  if (name == "nv2x2x4") return Topology::nv2x2x4;
  throw Error(ErrorCode::invalid_argument, "unknown topology '" + std::string(name) + "'");
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::conv: return "conv";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dropout: return "dropout";
    case LayerKind::dense: return "dense";
    case LayerKind::sigmoid: return "sigmoid";
  }
  return "?";
}

Shape electrode_grid(Topology topology) {
  switch (topology) {
    case Topology::nv1x16: return {16};
    case Topology::nv4x4: return {4, 4};
    case Topology::nv2x2x4: return {2, 2, 4};
  }
  return {};
}

namespace {

struct Block {
  Shape kernel;  // outer axes then time
  Shape pool;
  std::size_t maps;
};

// Time-axis schedule shared by all topologies: 3000 -> 600 -> 120 -> 24 -> 6 -> 2 -> 1.
constexpr std::size_t kTimeKernel[6] = {5, 5, 5, 4, 3, 2};
constexpr std::size_t kTimePool[6] = {5, 5, 5, 4, 3, 2};
constexpr std::size_t kMaps[6] = {16, 32, 32, 64, 64, 128};
constexpr std::size_t kHiddenUnits = 64;
constexpr double kInputDropout = 0.2;
constexpr double kHiddenDropout = 0.5;

std::vector<Block> blocks_for(Topology topology) {
  // Outer-axis (kernel, pool) extents per block.
  std::vector<std::pair<Shape, Shape>> outer;
  switch (topology) {
    case Topology::nv1x16:
      // extent 1 on the electrode axis: weights shared across channels, no mixing
      outer.assign(6, {{1}, {1}});
      break;
    case Topology::nv4x4:
      // (strip, contact); kernels span two neighbouring contacts of one strip
      outer = {{{1, 2}, {1, 1}}, {{1, 2}, {1, 2}}, {{1, 2}, {1, 2}},
               {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}}};
      break;
    case Topology::nv2x2x4:
      // (hemisphere, strip, contact): contacts, then strips within a
      // hemisphere, then across hemispheres
      outer = {{{1, 1, 2}, {1, 1, 2}}, {{1, 1, 2}, {1, 1, 2}}, {{1, 2, 1}, {1, 2, 1}},
               {{2, 1, 1}, {2, 1, 1}}, {{1, 1, 1}, {1, 1, 1}}, {{1, 1, 1}, {1, 1, 1}}};
      break;
  }
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < 6; ++i) {
    Block b{outer[i].first, outer[i].second, kMaps[i]};
    b.kernel.push_back(kTimeKernel[i]);
    b.pool.push_back(kTimePool[i]);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace

ModelSpec make_model_spec(Topology topology, const ElectrodeLayout& layout) {
  if (topology == Topology::nv2x2x4 && !layout.has_hemispheres()) {
    throw Error(ErrorCode::invalid_layout,
                "nv2x2x4 needs hemisphere assignments, which this subject's layout lacks");
  }
  ModelSpec spec;
  spec.topology = topology;
  spec.input_shape = {1};
  for (auto e : electrode_grid(topology)) spec.input_shape.push_back(e);
  spec.input_shape.push_back(kSegmentSamples);

  spec.layers.push_back({LayerKind::batchnorm, "input_bn", {}, 1, 1});
  std::size_t maps = 1;
  const auto blocks = blocks_for(topology);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string prefix = "block" + std::to_string(i + 1);
    const auto& b = blocks[i];
    spec.layers.push_back({LayerKind::conv, prefix + ".conv", b.kernel, maps, b.maps});
    spec.layers.push_back({LayerKind::batchnorm, prefix + ".bn", {}, b.maps, b.maps});
    spec.layers.push_back({LayerKind::relu, prefix + ".relu", {}});
    spec.layers.push_back({LayerKind::maxpool, prefix + ".pool", b.pool});
    maps = b.maps;
  }
  spec.layers.push_back({LayerKind::flatten, "flatten", {}});
  // Walk shapes once to size the head.
  const auto shapes = spec.activation_shapes();
  const std::size_t features = element_count(shapes.back());
  spec.layers.push_back({LayerKind::dropout, "head.dropout1", {}, 0, 0, kInputDropout});
  spec.layers.push_back({LayerKind::dense, "head.dense1", {}, features, kHiddenUnits});
  spec.layers.push_back({LayerKind::relu, "head.relu", {}});
  spec.layers.push_back({LayerKind::dropout, "head.dropout2", {}, 0, 0, kHiddenDropout});
  spec.layers.push_back({LayerKind::dense, "head.dense2", {}, kHiddenUnits, 1});
  spec.layers.push_back({LayerKind::sigmoid, "head.sigmoid", {}});
  return spec;
}

std::vector<Shape> ModelSpec::activation_shapes() const {
  std::vector<Shape> shapes;
  Shape current = input_shape;
  for (const auto& layer : layers) {
    switch (layer.kind) {
      case LayerKind::conv:
        if (current.size() != layer.extents.size() + 1 || current[0] != layer.maps_in) {
          throw Error(ErrorCode::shape_mismatch, "conv " + layer.name + " cannot take input " +
                                                     to_string(current));
        }
        current[0] = layer.maps_out;
        break;
      case LayerKind::maxpool:
        if (current.size() != layer.extents.size() + 1) {
          throw Error(ErrorCode::shape_mismatch, "pool " + layer.name + " rank mismatch");
        }
        for (std::size_t a = 0; a < layer.extents.size(); ++a) {
          if (current[a + 1] % layer.extents[a] != 0) {
            throw Error(ErrorCode::invalid_argument,
                        "pool " + layer.name + " window does not divide " + to_string(current));
          }
          current[a + 1] /= layer.extents[a];
        }
        break;
      case LayerKind::flatten:
        current = {element_count(current)};
        break;
      case LayerKind::dense:
        if (current != Shape{layer.maps_in}) {
          throw Error(ErrorCode::shape_mismatch,
                      "dense " + layer.name + " fan-in does not match " + to_string(current));
        }
        current = {layer.maps_out};
        break;
      default:
        break;
    }
    shapes.push_back(current);
  }
  return shapes;
}

std::vector<ParameterShape> ModelSpec::parameter_manifest() const {
  std::vector<ParameterShape> manifest;
  for (const auto& layer : layers) {
    switch (layer.kind) {
      case LayerKind::conv: {
        Shape kernel{layer.maps_out, layer.maps_in};
        kernel.insert(kernel.end(), layer.extents.begin(), layer.extents.end());
        manifest.push_back({layer.name + ".kernel", ParamRole::weight, kernel});
        manifest.push_back({layer.name + ".bias", ParamRole::bias, {layer.maps_out}});
        break;
      }
      case LayerKind::batchnorm:
        manifest.push_back({layer.name + ".gamma", ParamRole::bn_scale, {layer.maps_in}});
        manifest.push_back({layer.name + ".beta", ParamRole::bn_shift, {layer.maps_in}});
        manifest.push_back({layer.name + ".running_mean", ParamRole::running_mean, {layer.maps_in}});
        manifest.push_back({layer.name + ".running_var", ParamRole::running_var, {layer.maps_in}});
        break;
      case LayerKind::dense:
        manifest.push_back(
            {layer.name + ".weights", ParamRole::weight, {layer.maps_out, layer.maps_in}});
        manifest.push_back({layer.name + ".bias", ParamRole::bias, {layer.maps_out}});
        break;
      default:
        break;
    }
  }
  return manifest;
}

ParameterSet<float> init_parameters(const ModelSpec& spec, const RngStream& rng) {
  ParameterSet<float> params;
  for (const auto& entry : spec.parameter_manifest()) {
    switch (entry.role) {
      case ParamRole::weight: {
        // kernel (out, in, extents...) or dense (out, in)
        const std::size_t receptive =
            element_count(Shape(entry.shape.begin() + 2, entry.shape.end()));
        const std::size_t fan_in = entry.shape[1] * receptive;
        const std::size_t fan_out = entry.shape[0] * receptive;
        auto stream = rng.split(entry.name);
        params.add(entry.name, entry.role,
                   glorot_uniform<float>(entry.shape, fan_in, fan_out, stream));
        break;
      }
      case ParamRole::bn_scale:
      case ParamRole::running_var:
        params.add(entry.name, entry.role, Tensor<float>(entry.shape, 1.0f));
        break;
      default:
        params.add(entry.name, entry.role, Tensor<float>(entry.shape, 0.0f));
        break;
    }
  }
  return params;
}

std::pair<ModelSpec, ParameterSet<float>> build_topology(Topology topology,
                                                         const ElectrodeLayout& layout,
                                                         const RngStream& rng) {
  auto spec = make_model_spec(topology, layout);
  auto params = init_parameters(spec, rng);
  return {std::move(spec), std::move(params)};
}

template <typename T>
Network<T> instantiate(const ModelSpec& spec, const ParameterSet<T>& params) {
  Network<T> net;
  for (const auto& layer : spec.layers) {
    switch (layer.kind) {
      case LayerKind::batchnorm:
        net.template emplace<BatchNorm<T>>(layer.name, layer.maps_in);
        break;
      case LayerKind::conv: {
        Shape kernel{layer.maps_out, layer.maps_in};
        kernel.insert(kernel.end(), layer.extents.begin(), layer.extents.end());
        net.template emplace<Conv<T>>(layer.name, Tensor<T>(kernel),
                                      Tensor<T>(Shape{layer.maps_out}));
        break;
      }
      case LayerKind::relu:
        net.template emplace<Relu<T>>(layer.name);
        break;
      case LayerKind::maxpool:
        net.template emplace<MaxPool<T>>(layer.name, layer.extents);
        break;
      case LayerKind::flatten:
        net.template emplace<Flatten<T>>(layer.name);
        break;
      case LayerKind::dropout:
        net.template emplace<Dropout<T>>(layer.name, layer.rate);
        break;
      case LayerKind::dense:
        net.template emplace<Dense<T>>(layer.name, Tensor<T>(Shape{layer.maps_out, layer.maps_in}),
                                       Tensor<T>(Shape{layer.maps_out}));
        break;
      case LayerKind::sigmoid:
        net.template emplace<Sigmoid<T>>(layer.name);
        break;
    }
  }
  net.load_parameters(params);
  return net;
}

template Network<float> instantiate<float>(const ModelSpec&, const ParameterSet<float>&);
template Network<double> instantiate<double>(const ModelSpec&, const ParameterSet<double>&);

namespace {

// Destination cell of channel c on the topology's grid.
std::size_t grid_cell(Topology topology, const ElectrodeLayout& layout, std::size_t c) {
  switch (topology) {
    case Topology::nv1x16: return c;
    case Topology::nv4x4: return layout.grid_index_4x4(c);
    case Topology::nv2x2x4: return layout.grid_index_2x2x4(c);
  }
  return c;
}

void require_layout(Topology topology, const ElectrodeLayout& layout) {
  if (topology == Topology::nv2x2x4 && !layout.has_hemispheres()) {
    throw Error(ErrorCode::invalid_layout,
                "nv2x2x4 needs hemisphere assignments, which this layout lacks");
  }
}

}  // namespace

template <typename T>
Tensor<T> reshape_segment(const Tensor<float>& segment, Topology topology,
                          const ElectrodeLayout& layout) {
  if (segment.shape() != Shape{kSegmentChannels, kSegmentSamples}) {
    throw Error(ErrorCode::shape_mismatch,
                "segment must be (16, 3000), got " + to_string(segment.shape()));
  }
  const std::size_t indices[1] = {0};
  auto batch = network_input<T>(segment.reshaped({1, kSegmentChannels, kSegmentSamples}),
                                indices, topology, layout);
  Shape grid = electrode_grid(topology);
  grid.push_back(kSegmentSamples);
  return std::move(batch).reshaped(grid);
}

template <typename T>
Tensor<float> unreshape_segment(const Tensor<T>& grid, Topology topology,
                                const ElectrodeLayout& layout) {
  require_layout(topology, layout);
  if (grid.size() != kSegmentChannels * kSegmentSamples) {
    throw Error(ErrorCode::shape_mismatch, "grid does not hold 16 x 3000 samples");
  }
  Tensor<float> out(Shape{kSegmentChannels, kSegmentSamples});
  for (std::size_t c = 0; c < kSegmentChannels; ++c) {
    const T* src = grid.data() + grid_cell(topology, layout, c) * kSegmentSamples;
    float* dst = out.data() + c * kSegmentSamples;
    for (std::size_t t = 0; t < kSegmentSamples; ++t) dst[t] = static_cast<float>(src[t]);
  }
  return out;
}

template <typename T>
Tensor<T> network_input(const Tensor<float>& segments, std::span<const std::size_t> indices,
                        Topology topology, const ElectrodeLayout& layout) {
  require_layout(topology, layout);
  if (segments.rank() != 3 || segments.dim(1) != kSegmentChannels ||
      segments.dim(2) != kSegmentSamples) {
    throw Error(ErrorCode::shape_mismatch,
                "segments must be (n, 16, 3000), got " + to_string(segments.shape()));
  }
  Shape shape{indices.size(), 1};
  for (auto e : electrode_grid(topology)) shape.push_back(e);
  shape.push_back(kSegmentSamples);
  Tensor<T> out(shape);
  const std::size_t per_segment = kSegmentChannels * kSegmentSamples;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= segments.dim(0)) {
      throw Error(ErrorCode::invalid_argument, "segment index out of range");
    }
    const float* src = segments.data() + indices[k] * per_segment;
    T* dst = out.data() + k * per_segment;
    for (std::size_t c = 0; c < kSegmentChannels; ++c) {
      const std::size_t cell = grid_cell(topology, layout, c);
      std::copy(src + c * kSegmentSamples, src + (c + 1) * kSegmentSamples,
                dst + cell * kSegmentSamples);
    }
  }
  return out;
}

template Tensor<float> reshape_segment<float>(const Tensor<float>&, Topology,
                                              const ElectrodeLayout&);
template Tensor<double> reshape_segment<double>(const Tensor<float>&, Topology,
                                                const ElectrodeLayout&);
template Tensor<float> unreshape_segment<float>(const Tensor<float>&, Topology,
                                                const ElectrodeLayout&);
template Tensor<float> unreshape_segment<double>(const Tensor<double>&, Topology,
                                                 const ElectrodeLayout&);
template Tensor<float> network_input<float>(const Tensor<float>&, std::span<const std::size_t>,
                                            Topology, const ElectrodeLayout&);
template Tensor<double> network_input<double>(const Tensor<float>&, std::span<const std::size_t>,
                                              Topology, const ElectrodeLayout&);

}  // namespace ictal
