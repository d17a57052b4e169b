#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ictal/topology.hpp"
#include "oracles.hpp"

namespace ictal {
namespace {

const Topology kAll[] = {Topology::nv1x16, Topology::nv4x4, Topology::nv2x2x4};

ElectrodeLayout shuffled_layout(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::array<std::size_t, 16> perm{};
  for (std::size_t i = 0; i < 16; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  std::array<ElectrodePosition, 16> p{};
  for (std::size_t c = 0; c < 16; ++c) {
    p[c].strip = static_cast<std::uint8_t>(perm[c] / 4);
    p[c].contact = static_cast<std::uint8_t>(perm[c] % 4);
    p[c].hemisphere = static_cast<std::uint8_t>(perm[c] / 8);
  }
  return ElectrodeLayout(p);
}

Tensor<float> random_segment(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return testing::random_tensor(Shape{16, 3000}, gen).cast<float>();
}

std::vector<std::size_t> time_chain(const ModelSpec& spec) {
  std::vector<std::size_t> chain;
  const auto shapes = spec.activation_shapes();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].kind == LayerKind::maxpool) chain.push_back(shapes[i].back());
  }
  return chain;
}

std::vector<Shape> grid_chain(const ModelSpec& spec) {
  std::vector<Shape> chain{Shape(spec.input_shape.begin() + 1, spec.input_shape.end() - 1)};
  const auto shapes = spec.activation_shapes();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].kind != LayerKind::maxpool) continue;
    Shape grid(shapes[i].begin() + 1, shapes[i].end() - 1);
    if (grid != chain.back()) chain.push_back(grid);
  }
  return chain;
}

TEST(Topology, ParseAndName) {
  for (auto t : kAll) EXPECT_EQ(parse_topology(to_string(t)), t);
  EXPECT_THROW(parse_topology("nv8x2"), Error);
}

TEST(Topology, PoolScheduleProductIs3000) {
  for (auto t : kAll) {
    const auto spec = make_model_spec(t, ElectrodeLayout::identity(true));
    std::size_t product = 1;
    for (const auto& l : spec.layers) {
      if (l.kind == LayerKind::maxpool) product *= l.extents.back();
    }
    EXPECT_EQ(product, 3000u) << to_string(t);
    EXPECT_EQ(time_chain(spec), (std::vector<std::size_t>{600, 120, 24, 6, 2, 1}));
  }
}

TEST(Topology, SpatialChains) {
  const auto layout = ElectrodeLayout::identity(true);
  EXPECT_EQ(grid_chain(make_model_spec(Topology::nv2x2x4, layout)),
            (std::vector<Shape>{{2, 2, 4}, {2, 2, 2}, {2, 2, 1}, {2, 1, 1}, {1, 1, 1}}));
  EXPECT_EQ(grid_chain(make_model_spec(Topology::nv4x4, layout)),
            (std::vector<Shape>{{4, 4}, {4, 2}, {4, 1}}));
  EXPECT_EQ(grid_chain(make_model_spec(Topology::nv1x16, layout)), (std::vector<Shape>{{16}}));
}

TEST(Topology, FlattenWidths) {
  const auto layout = ElectrodeLayout::identity(true);
  auto dense_fan_in = [&](Topology t) {
    for (const auto& l : make_model_spec(t, layout).layers) {
      if (l.kind == LayerKind::dense) return l.maps_in;
    }
    return std::size_t{0};
  };
  EXPECT_EQ(dense_fan_in(Topology::nv1x16), 128u * 16);
  EXPECT_EQ(dense_fan_in(Topology::nv4x4), 128u * 4);
  EXPECT_EQ(dense_fan_in(Topology::nv2x2x4), 128u);
}

TEST(Topology, StackComposition) {
  const auto spec = make_model_spec(Topology::nv1x16, ElectrodeLayout::identity(false));
  std::size_t bn = 0, conv = 0, pool = 0, relu = 0, dropout = 0, dense = 0;
  std::vector<std::size_t> maps;
  std::vector<double> rates;
  for (const auto& l : spec.layers) {
    bn += l.kind == LayerKind::batchnorm;
    conv += l.kind == LayerKind::conv;
    pool += l.kind == LayerKind::maxpool;
    relu += l.kind == LayerKind::relu;
    dense += l.kind == LayerKind::dense;
    if (l.kind == LayerKind::conv) maps.push_back(l.maps_out);
    if (l.kind == LayerKind::dropout) {
      ++dropout;
      rates.push_back(l.rate);
    }
  }
  EXPECT_EQ(spec.layers.front().kind, LayerKind::batchnorm);
  EXPECT_EQ(spec.layers.back().kind, LayerKind::sigmoid);
  EXPECT_EQ(bn, 7u);
  EXPECT_EQ(conv, 6u);
  EXPECT_EQ(pool, 6u);
  EXPECT_EQ(relu, 7u);
  EXPECT_EQ(dense, 2u);
  EXPECT_EQ(maps, (std::vector<std::size_t>{16, 32, 32, 64, 64, 128}));
  EXPECT_EQ(rates, (std::vector<double>{0.2, 0.5}));
}

TEST(Topology, Nv1x16HasNoChannelMixingKernels) {
  const auto spec = make_model_spec(Topology::nv1x16, ElectrodeLayout::identity(false));
  std::size_t kernels = 0;
  for (const auto& p : spec.parameter_manifest()) {
    if (p.role != ParamRole::weight || p.shape.size() != 4) continue;
    ++kernels;
    EXPECT_EQ(p.shape[2], 1u) << p.name;
  }
  EXPECT_EQ(kernels, 6u);
}

TEST(Topology, Nv4x4NeverMixesStrips) {
  const auto spec = make_model_spec(Topology::nv4x4, ElectrodeLayout::identity(false));
  for (const auto& l : spec.layers) {
    if (l.kind == LayerKind::conv || l.kind == LayerKind::maxpool) {
      EXPECT_EQ(l.extents[0], 1u);
    }
  }
}

TEST(Topology, Nv2x2x4NeedsHemispheres) {
  EXPECT_THROW(make_model_spec(Topology::nv2x2x4, ElectrodeLayout::identity(false)), Error);
  EXPECT_NO_THROW(make_model_spec(Topology::nv4x4, ElectrodeLayout::identity(false)));
}

TEST(Topology, KernelExtentsWithinDesignRange) {
  for (auto t : kAll) {
    for (const auto& l : make_model_spec(t, ElectrodeLayout::identity(true)).layers) {
      for (auto e : l.extents) {
        EXPECT_GE(e, 1u);
        EXPECT_LE(e, 5u);
      }
    }
  }
}

TEST(Topology, InitialParameters) {
  const auto [spec, params] =
      build_topology(Topology::nv4x4, ElectrodeLayout::identity(true), RngStream(3));
  const auto manifest = spec.parameter_manifest();
  ASSERT_EQ(manifest.size(), params.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& e = params.entries()[i];
    EXPECT_EQ(e.name, manifest[i].name);
    EXPECT_EQ(e.value.shape(), manifest[i].shape);
    switch (e.role) {
      case ParamRole::weight: {
        std::size_t fan_in = 1, fan_out = 1;
        for (std::size_t a = 1; a < e.value.rank(); ++a) fan_in *= e.value.dim(a);
        fan_out = e.value.dim(0) * (fan_in / e.value.dim(1));
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (float v : e.value.values()) EXPECT_LE(std::abs(v), limit) << e.name;
        break;
      }
      case ParamRole::bn_scale:
      case ParamRole::running_var:
        for (float v : e.value.values()) EXPECT_EQ(v, 1.0f);
        break;
      default:
        for (float v : e.value.values()) EXPECT_EQ(v, 0.0f);
    }
  }
}

TEST(Topology, ManifestShapesIndependentOfSeed) {
  const auto layout = ElectrodeLayout::identity(true);
  for (auto t : kAll) {
    const auto a = build_topology(t, layout, RngStream(1));
    const auto b = build_topology(t, layout, RngStream(2));
    ASSERT_EQ(a.second.size(), b.second.size());
    bool any_differs = false;
    for (std::size_t i = 0; i < a.second.size(); ++i) {
      EXPECT_EQ(a.second.entries()[i].value.shape(), b.second.entries()[i].value.shape());
      any_differs |= a.second.entries()[i].value != b.second.entries()[i].value;
    }
    EXPECT_TRUE(any_differs);
  }
}

TEST(Topology, ForwardYieldsOneProbabilityPerSegment) {
  const auto layout = ElectrodeLayout::identity(true);
  Tensor<float> segments(Shape{2, 16, 3000});
  const auto s0 = random_segment(1), s1 = random_segment(2);
  std::copy(s0.values().begin(), s0.values().end(), segments.data());
  std::copy(s1.values().begin(), s1.values().end(), segments.data() + 48000);
  const std::vector<std::size_t> idx{0, 1};
  for (auto t : kAll) {
    auto [spec, params] = build_topology(t, layout, RngStream(4));
    auto net = instantiate<float>(spec, params);
    const auto p = net.predict(network_input<float>(segments, idx, t, layout));
    ASSERT_EQ(p.shape(), (Shape{2, 1}));
    for (float v : p.values()) {
      EXPECT_GT(v, 0.0f);
      EXPECT_LT(v, 1.0f);
    }
  }
}

TEST(Reshape, Nv4x4IdentityLayoutIndexArithmetic) {
  const auto x = random_segment(5);
  const auto grid = reshape_segment<float>(x, Topology::nv4x4, ElectrodeLayout::identity(false));
  ASSERT_EQ(grid.shape(), (Shape{4, 4, 3000}));
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t t = 0; t < 3000; t += 299) {
        EXPECT_EQ(grid.at({s, k, t}), x.at({4 * s + k, t}));
      }
    }
  }
}

TEST(Reshape, Nv1x16IgnoresLayout) {
  const auto x = random_segment(6);
  EXPECT_EQ(reshape_segment<float>(x, Topology::nv1x16, shuffled_layout(9)), x);
}

TEST(Reshape, PermutedLayoutRoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto layout = shuffled_layout(seed);
    const auto x = random_segment(seed);
    for (auto t : kAll) {
      const auto grid = reshape_segment<double>(x, t, layout);
      EXPECT_EQ(unreshape_segment<double>(grid, t, layout), x);
    }
  }
}

TEST(Reshape, Nv2x2x4Placement) {
  const auto layout = shuffled_layout(12);
  const auto x = random_segment(3);
  const auto grid = reshape_segment<float>(x, Topology::nv2x2x4, layout);
  ASSERT_EQ(grid.shape(), (Shape{2, 2, 4, 3000}));
  for (std::size_t c = 0; c < 16; ++c) {
    const auto& pos = layout.channel(c);
    EXPECT_EQ(grid.at({*pos.hemisphere, layout.strip_within_hemisphere(c), pos.contact, 17}),
              x.at({c, 17}));
  }
}

TEST(Reshape, WrongSegmentShapeRejected) {
  EXPECT_THROW(reshape_segment<float>(Tensor<float>(Shape{15, 3000}), Topology::nv1x16,
                                      ElectrodeLayout::identity(false)),
               Error);
  EXPECT_THROW(reshape_segment<float>(Tensor<float>(Shape{16, 3000}), Topology::nv2x2x4,
                                      ElectrodeLayout::identity(false)),
               Error);
}

}  // namespace
}  // namespace ictal
