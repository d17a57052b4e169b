#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ictal/tensor.hpp"

namespace ictal {

enum class ParamRole : std::uint8_t {
  weight = 0,        // conv kernels and dense weights; the only L1/L2 targets
  bias = 1,
  bn_scale = 2,
  bn_shift = 3,
  running_mean = 4,  // running statistics are state, not trainable
  running_var = 5,
};

constexpr bool is_trainable(ParamRole role) {
  return role != ParamRole::running_mean && role != ParamRole::running_var;
}
constexpr bool is_regularized(ParamRole role) { return role == ParamRole::weight; }

template <typename T>
struct NamedTensor {
  std::string name;
  ParamRole role;
  Tensor<T> value;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Ordered collection of every learnable array and batch-norm statistic of
/// one model. Order follows the layer stack and is stable across seeds.
template <typename T>
class ParameterSet {
 public:
  void add(std::string name, ParamRole role, Tensor<T> value);

  const NamedTensor<T>* find(std::string_view name) const;
  NamedTensor<T>* find(std::string_view name);
  const Tensor<T>& at(std::string_view name) const;

  const std::vector<NamedTensor<T>>& entries() const noexcept { return entries_; }
  std::vector<NamedTensor<T>>& entries() noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  template <typename U>
  ParameterSet<U> cast() const {
    ParameterSet<U> out;
    for (const auto& e : entries_) out.add(e.name, e.role, e.value.template cast<U>());
    return out;
  }

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::vector<NamedTensor<T>> entries_;
};

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;

// Binary parameter file: "ICPS", u16 version, u16 reserved, u32 count, then
// per entry u16 name length, name bytes, u8 role, u8 rank, u32 extents,
// f32 values. Little-endian throughout.
void save_parameters(const ParameterSet<float>& params, const std::filesystem::path& path);
ParameterSet<float> load_parameters(const std::filesystem::path& path);

}  // namespace ictal
