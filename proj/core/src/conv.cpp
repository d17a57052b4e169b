#include "ictal/layers/conv.hpp"

#include <algorithm>

namespace ictal {

namespace {

// out[t] += sum_d w[d] * in[t + d - offset] over t in [0, n), zero outside.
template <typename T, std::size_t K>
void correlate_fixed(T* __restrict out, const T* __restrict in, const T* __restrict w,
                     std::ptrdiff_t offset, std::ptrdiff_t n) {
  const std::ptrdiff_t lo = std::min<std::ptrdiff_t>(offset, n);
  const std::ptrdiff_t hi =
      std::max<std::ptrdiff_t>(lo, n - (static_cast<std::ptrdiff_t>(K) - 1 - offset));
  auto edge = [&](std::ptrdiff_t t) {
    T acc = 0;
    for (std::size_t d = 0; d < K; ++d) {
      const std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(d) - offset;
      if (s >= 0 && s < n) acc += w[d] * in[s];
    }
    out[t] += acc;
  };
  for (std::ptrdiff_t t = 0; t < lo; ++t) edge(t);
  const T* base = in - offset;
  if constexpr (K == 1) {
    const T w0 = w[0];
    for (std::ptrdiff_t t = lo; t < hi; ++t) out[t] += w0 * base[t];
  } else if constexpr (K == 2) {
    const T w0 = w[0], w1 = w[1];
    for (std::ptrdiff_t t = lo; t < hi; ++t) out[t] += w0 * base[t] + w1 * base[t + 1];
  } else if constexpr (K == 3) {
    const T w0 = w[0], w1 = w[1], w2 = w[2];
    for (std::ptrdiff_t t = lo; t < hi; ++t)
      out[t] += w0 * base[t] + w1 * base[t + 1] + w2 * base[t + 2];
  } else if constexpr (K == 4) {
    const T w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3];
    for (std::ptrdiff_t t = lo; t < hi; ++t)
      out[t] += w0 * base[t] + w1 * base[t + 1] + w2 * base[t + 2] + w3 * base[t + 3];
  } else {
    static_assert(K == 5);
    const T w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3], w4 = w[4];
    for (std::ptrdiff_t t = lo; t < hi; ++t)
      out[t] += w0 * base[t] + w1 * base[t + 1] + w2 * base[t + 2] + w3 * base[t + 3] +
                w4 * base[t + 4];
  }
  for (std::ptrdiff_t t = std::max(hi, lo); t < n; ++t) edge(t);
}

template <typename T>
void correlate(T* out, const T* in, const T* w, std::size_t taps, std::ptrdiff_t offset,
               std::ptrdiff_t n) {
  switch (taps) {
    case 1: return correlate_fixed<T, 1>(out, in, w, offset, n);
    case 2: return correlate_fixed<T, 2>(out, in, w, offset, n);
    case 3: return correlate_fixed<T, 3>(out, in, w, offset, n);
    case 4: return correlate_fixed<T, 4>(out, in, w, offset, n);
    case 5: return correlate_fixed<T, 5>(out, in, w, offset, n);
  }
  throw Error(ErrorCode::invalid_argument, "conv: unsupported tap count");
}

template <typename T>
T dot(const T* __restrict a, const T* __restrict b, std::ptrdiff_t n) {
  T acc = 0;
#pragma omp simd reduction(+ : acc)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// Shape bookkeeping for one forward/backward call. Spatial axes other than
// the last ("outer" axes) are handled through a precomputed table of
// (output position, kernel offset) -> input position pairs.
struct Geometry {
  std::size_t batch = 0;
  std::size_t maps_in = 0;
  std::size_t maps_out = 0;
  std::size_t length = 0;       // time extent
  std::size_t positions = 0;    // product of outer spatial extents
  std::size_t taps = 0;         // time kernel extent
  std::ptrdiff_t offset = 0;    // time kernel anchor
  std::size_t outer_taps = 0;   // product of outer kernel extents

  struct Pair {
    std::size_t out_pos;
    std::size_t outer_tap;
    std::size_t in_pos;
  };
  std::vector<Pair> pairs;

  Geometry(const Shape& input, const Shape& kernel) {
    const std::size_t rank = kernel.size() - 2;
    batch = input[0];
    maps_in = kernel[1];
    maps_out = kernel[0];
    length = input.back();
    taps = kernel.back();
    offset = static_cast<std::ptrdiff_t>((taps - 1) / 2);

    const Shape space(input.begin() + 2, input.end() - 1);
    const Shape ext(kernel.begin() + 2, kernel.end() - 1);
    positions = element_count(space);
    outer_taps = element_count(ext);
    const auto space_strides = row_major_strides(space);

    std::vector<std::size_t> p(rank - 1, 0);
    for (std::size_t out_pos = 0; out_pos < positions; ++out_pos) {
      std::vector<std::size_t> k(rank - 1, 0);
      for (std::size_t tap = 0; tap < outer_taps; ++tap) {
        bool valid = true;
        std::size_t in_pos = 0;
        for (std::size_t a = 0; a + 1 < rank; ++a) {
          const auto q = static_cast<std::ptrdiff_t>(p[a] + k[a]) -
                         static_cast<std::ptrdiff_t>((ext[a] - 1) / 2);
          if (q < 0 || q >= static_cast<std::ptrdiff_t>(space[a])) {
            valid = false;
            break;
          }
          in_pos += static_cast<std::size_t>(q) * space_strides[a];
        }
        if (valid) pairs.push_back({out_pos, tap, in_pos});
        for (std::size_t a = rank - 1; a-- > 0;) {
          if (++k[a] < ext[a]) break;
          k[a] = 0;
        }
      }
      for (std::size_t a = rank - 1; a-- > 0;) {
        if (++p[a] < space[a]) break;
        p[a] = 0;
      }
    }
  }
};

// Rows shorter than this go through an unrolled (im2col) matrix product; the
// per-row kernels above are dominated by edge handling there.
constexpr std::size_t kShortRow = 32;

// Column matrix for one batch item: row r = (c, outer tap, time tap), column
// j = (output position, t). Out-of-range taps stay zero.
template <typename T>
void im2col(std::vector<T>& cols, const T* in_b, const Geometry& g) {
  const std::size_t n = g.length;
  const std::size_t in_map = g.positions * n;
  cols.assign(g.maps_in * g.outer_taps * g.taps * in_map, T{0});
  for (std::size_t c = 0; c < g.maps_in; ++c) {
    for (const auto& pr : g.pairs) {
      const T* src = in_b + c * in_map + pr.in_pos * n;
      for (std::size_t d = 0; d < g.taps; ++d) {
        const std::size_t r = (c * g.outer_taps + pr.outer_tap) * g.taps + d;
        T* dst = cols.data() + r * in_map + pr.out_pos * n;
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(d) - g.offset;
        for (std::size_t t = 0; t < n; ++t) {
          const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t) + shift;
          if (s >= 0 && s < static_cast<std::ptrdiff_t>(n)) dst[t] = src[s];
        }
      }
    }
  }
}

template <typename T>
void col2im_add(T* grad_b, const std::vector<T>& cols, const Geometry& g) {
  const std::size_t n = g.length;
  const std::size_t in_map = g.positions * n;
  for (std::size_t c = 0; c < g.maps_in; ++c) {
    for (const auto& pr : g.pairs) {
      T* dst = grad_b + c * in_map + pr.in_pos * n;
      for (std::size_t d = 0; d < g.taps; ++d) {
        const std::size_t r = (c * g.outer_taps + pr.outer_tap) * g.taps + d;
        const T* src = cols.data() + r * in_map + pr.out_pos * n;
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(d) - g.offset;
        for (std::size_t t = 0; t < n; ++t) {
          const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t) + shift;
          if (s >= 0 && s < static_cast<std::ptrdiff_t>(n)) dst[s] += src[t];
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Conv<T>::Conv(std::string name, Tensor<T> kernel, Tensor<T> bias)
    : Layer<T>(std::move(name)), kernel_(std::move(kernel)), bias_(std::move(bias)) {
  if (kernel_.rank() < 3) {
    throw Error(ErrorCode::invalid_argument,
                "conv '" + this->name() + "': kernel needs (out, in, extents...), got " +
                    to_string(kernel_.shape()));
  }
  for (auto extent : extents()) {
    if (extent < 1 || extent > kMaxExtent) {
      throw Error(ErrorCode::invalid_argument,
                  "conv '" + this->name() + "': kernel extents must lie in [1, 5], got " +
                      to_string(kernel_.shape()));
    }
  }
  if (bias_.shape() != Shape{maps_out()}) {
    throw Error(ErrorCode::shape_mismatch,
                "conv '" + this->name() + "': bias must have one entry per output map");
  }
  kernel_grad_ = Tensor<T>(kernel_.shape());
  bias_grad_ = Tensor<T>(bias_.shape());
}

template <typename T>
void Conv<T>::check_input(const Tensor<T>& input) const {
  if (input.rank() != kernel_.rank()) {
    throw Error(ErrorCode::shape_mismatch,
                "conv '" + this->name() + "': input " + to_string(input.shape()) +
                    " has wrong rank for kernel " + to_string(kernel_.shape()));
  }
  if (input.dim(1) != maps_in()) {
    throw Error(ErrorCode::shape_mismatch,
                "conv '" + this->name() + "': input has " + std::to_string(input.dim(1)) +
                    " feature maps, kernel expects " + std::to_string(maps_in()));
  }
}

template <typename T>
Tensor<T> Conv<T>::forward(const Tensor<T>& input, Mode, RngStream*) {
  check_input(input);
  const Geometry g(input.shape(), kernel_.shape());
  Shape out_shape = input.shape();
  out_shape[1] = g.maps_out;
  Tensor<T> out(out_shape);

  const std::size_t in_map = g.positions * g.length;
  const std::size_t kernel_map = g.outer_taps * g.taps;
  const auto n = static_cast<std::ptrdiff_t>(g.length);
  if (g.length < kShortRow) {
    const std::size_t rows = g.maps_in * kernel_map;
    std::vector<T> cols;
    for (std::size_t b = 0; b < g.batch; ++b) {
      im2col(cols, input.data() + b * g.maps_in * in_map, g);
      T* out_b = out.data() + b * g.maps_out * in_map;
      for (std::size_t f = 0; f < g.maps_out; ++f) {
        T* __restrict y = out_b + f * in_map;
        std::fill(y, y + in_map, bias_[f]);
        const T* w = kernel_.data() + f * rows;
        for (std::size_t r = 0; r < rows; ++r) {
          const T wr = w[r];
          const T* __restrict x = cols.data() + r * in_map;
#pragma omp simd
          for (std::size_t j = 0; j < in_map; ++j) y[j] += wr * x[j];
        }
      }
    }
    this->record_forward(input.shape(), out.shape());
    return out;
  }
  for (std::size_t b = 0; b < g.batch; ++b) {
    const T* in_b = input.data() + b * g.maps_in * in_map;
    T* out_b = out.data() + b * g.maps_out * in_map;
    for (std::size_t f = 0; f < g.maps_out; ++f) {
      T* out_f = out_b + f * in_map;
      std::fill(out_f, out_f + in_map, bias_[f]);
      for (std::size_t c = 0; c < g.maps_in; ++c) {
        const T* in_c = in_b + c * in_map;
        const T* w = kernel_.data() + (f * g.maps_in + c) * kernel_map;
        for (const auto& pr : g.pairs) {
          correlate(out_f + pr.out_pos * g.length, in_c + pr.in_pos * g.length,
                    w + pr.outer_tap * g.taps, g.taps, g.offset, n);
        }
      }
    }
  }
  this->record_forward(input.shape(), out.shape());
  return out;
}

template <typename T>
Tensor<T> Conv<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  const Geometry g(input.shape(), kernel_.shape());
  Tensor<T> input_grad(input.shape());
  kernel_grad_.fill(0);
  bias_grad_.fill(0);

  const std::size_t in_map = g.positions * g.length;
  const std::size_t kernel_map = g.outer_taps * g.taps;
  const auto n = static_cast<std::ptrdiff_t>(g.length);
  if (g.length < kShortRow) {
    const std::size_t rows = g.maps_in * kernel_map;
    std::vector<T> cols;
    std::vector<T> dcols(rows * in_map);
    for (std::size_t b = 0; b < g.batch; ++b) {
      im2col(cols, input.data() + b * g.maps_in * in_map, g);
      std::fill(dcols.begin(), dcols.end(), T{0});
      const T* up_b = upstream.data() + b * g.maps_out * in_map;
      for (std::size_t f = 0; f < g.maps_out; ++f) {
        const T* dy = up_b + f * in_map;
        T bias_acc = 0;
#pragma omp simd reduction(+ : bias_acc)
        for (std::size_t j = 0; j < in_map; ++j) bias_acc += dy[j];
        bias_grad_[f] += bias_acc;
        const T* w = kernel_.data() + f * rows;
        T* kg = kernel_grad_.data() + f * rows;
        for (std::size_t r = 0; r < rows; ++r) {
          const T* x = cols.data() + r * in_map;
          kg[r] += dot(dy, x, static_cast<std::ptrdiff_t>(in_map));
          const T wr = w[r];
          T* __restrict dx = dcols.data() + r * in_map;
#pragma omp simd
          for (std::size_t j = 0; j < in_map; ++j) dx[j] += wr * dy[j];
        }
      }
      col2im_add(input_grad.data() + b * g.maps_in * in_map, dcols, g);
    }
    return input_grad;
  }
  // Input gradient is a correlation of the upstream rows with the reversed
  // kernel, anchored at taps - 1 - offset.
  const std::ptrdiff_t flipped_offset = static_cast<std::ptrdiff_t>(g.taps) - 1 - g.offset;
  std::vector<T> flipped(kernel_.size());
  for (std::size_t row = 0; row < kernel_.size() / g.taps; ++row) {
    for (std::size_t d = 0; d < g.taps; ++d) {
      flipped[row * g.taps + d] = kernel_[row * g.taps + (g.taps - 1 - d)];
    }
  }

  for (std::size_t b = 0; b < g.batch; ++b) {
    const T* in_b = input.data() + b * g.maps_in * in_map;
    const T* up_b = upstream.data() + b * g.maps_out * in_map;
    T* grad_b = input_grad.data() + b * g.maps_in * in_map;
    for (std::size_t f = 0; f < g.maps_out; ++f) {
      const T* up_f = up_b + f * in_map;
      T bias_acc = 0;
#pragma omp simd reduction(+ : bias_acc)
      for (std::size_t i = 0; i < in_map; ++i) bias_acc += up_f[i];
      bias_grad_[f] += bias_acc;

      for (std::size_t c = 0; c < g.maps_in; ++c) {
        const T* in_c = in_b + c * in_map;
        T* grad_c = grad_b + c * in_map;
        const std::size_t kbase = (f * g.maps_in + c) * kernel_map;
        T* kgrad = kernel_grad_.data() + kbase;
        const T* wflip = flipped.data() + kbase;
        for (const auto& pr : g.pairs) {
          const T* up_row = up_f + pr.out_pos * g.length;
          const T* in_row = in_c + pr.in_pos * g.length;
          correlate(grad_c + pr.in_pos * g.length, up_row, wflip + pr.outer_tap * g.taps,
                    g.taps, flipped_offset, n);
          T* kg = kgrad + pr.outer_tap * g.taps;
          for (std::size_t d = 0; d < g.taps; ++d) {
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(d) - g.offset;
            const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
            const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(n, n - shift);
            if (t1 > t0) kg[d] += dot(up_row + t0, in_row + t0 + shift, t1 - t0);
          }
        }
      }
    }
  }
  return input_grad;
}

template <typename T>
std::vector<ParamView<T>> Conv<T>::parameters() {
  return {{this->name() + ".kernel", ParamRole::weight, &kernel_, &kernel_grad_},
          {this->name() + ".bias", ParamRole::bias, &bias_, &bias_grad_}};
}

template class Conv<float>;
template class Conv<double>;

}  // namespace ictal
