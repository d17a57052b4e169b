#include "ictal/layers/pooling.hpp"

namespace ictal {

template <typename T>
MaxPool<T>::MaxPool(std::string name, Shape window)
    : Layer<T>(std::move(name)), window_(std::move(window)) {
  if (window_.empty()) {
    throw Error(ErrorCode::invalid_argument, "maxpool '" + this->name() + "': empty window");
  }
  for (auto w : window_) {
    if (w == 0) {
      throw Error(ErrorCode::invalid_argument,
                  "maxpool '" + this->name() + "': window extents must be positive");
    }
  }
}

template <typename T>
Tensor<T> MaxPool<T>::forward(const Tensor<T>& input, Mode, RngStream*) {
  const std::size_t rank = window_.size();
  if (input.rank() != rank + 2) {
    throw Error(ErrorCode::shape_mismatch, "maxpool '" + this->name() + "': input " +
                                               to_string(input.shape()) + " vs window " +
                                               to_string(window_));
  }
  const Shape space(input.shape().begin() + 2, input.shape().end());
  Shape pooled(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    if (space[a] % window_[a] != 0) {
      throw Error(ErrorCode::invalid_argument,
                  "maxpool '" + this->name() + "': extent " + std::to_string(space[a]) +
                      " not divisible by window " + std::to_string(window_[a]));
    }
    pooled[a] = space[a] / window_[a];
  }
  const auto strides = row_major_strides(space);
  const std::size_t plane = element_count(space);
  const std::size_t out_plane = element_count(pooled);

  // Offsets of every window element relative to its origin, in row-major
  // window order so the first maximum found has the lowest input index.
  std::vector<std::size_t> window_offsets;
  {
    std::vector<std::size_t> k(rank, 0);
    for (std::size_t i = 0; i < element_count(window_); ++i) {
      std::size_t off = 0;
      for (std::size_t a = 0; a < rank; ++a) off += k[a] * strides[a];
      window_offsets.push_back(off);
      for (std::size_t a = rank; a-- > 0;) {
        if (++k[a] < window_[a]) break;
        k[a] = 0;
      }
    }
  }
  std::vector<std::size_t> origins(out_plane);
  {
    std::vector<std::size_t> p(rank, 0);
    for (std::size_t j = 0; j < out_plane; ++j) {
      std::size_t off = 0;
      for (std::size_t a = 0; a < rank; ++a) off += p[a] * window_[a] * strides[a];
      origins[j] = off;
      for (std::size_t a = rank; a-- > 0;) {
        if (++p[a] < pooled[a]) break;
        p[a] = 0;
      }
    }
  }

  Shape out_shape{input.dim(0), input.dim(1)};
  out_shape.insert(out_shape.end(), pooled.begin(), pooled.end());
  Tensor<T> out(out_shape);
  const std::size_t planes = input.dim(0) * input.dim(1);
  argmax_.assign(out.size(), 0);
  for (std::size_t pl = 0; pl < planes; ++pl) {
    const std::size_t in_base = pl * plane;
    const T* src = input.data() + in_base;
    for (std::size_t j = 0; j < out_plane; ++j) {
      std::size_t best = origins[j] + window_offsets[0];
      T best_value = src[best];
      for (std::size_t w = 1; w < window_offsets.size(); ++w) {
        const std::size_t idx = origins[j] + window_offsets[w];
        if (src[idx] > best_value) {
          best_value = src[idx];
          best = idx;
        }
      }
      out[pl * out_plane + j] = best_value;
      argmax_[pl * out_plane + j] = in_base + best;
    }
  }
  this->record_forward(input.shape(), out.shape());
  return out;
}

template <typename T>
Tensor<T> MaxPool<T>::backward(const Tensor<T>& input, const Tensor<T>& upstream) {
  this->check_backward(input, upstream);
  Tensor<T> grad(input.shape());
  for (std::size_t j = 0; j < upstream.size(); ++j) grad[argmax_[j]] += upstream[j];
  return grad;
}

template <typename T>
void MaxPool<T>::routing_signature(std::vector<std::int64_t>& out) const {
  out.insert(out.end(), argmax_.begin(), argmax_.end());
}

template class MaxPool<float>;
template class MaxPool<double>;

}  // namespace ictal
