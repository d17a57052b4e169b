#include "ictal/parameters.hpp"

#include <fstream>

#include "binary_io.hpp"

namespace ictal {

template <typename T>
void ParameterSet<T>::add(std::string name, ParamRole role, Tensor<T> value) {
  if (find(name) != nullptr) {
    throw Error(ErrorCode::invalid_argument, "duplicate parameter name: " + name);
  }
  entries_.push_back({std::move(name), role, std::move(value)});
}

template <typename T>
const NamedTensor<T>* ParameterSet<T>::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

template <typename T>
NamedTensor<T>* ParameterSet<T>::find(std::string_view name) {
  for (auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

template <typename T>
const Tensor<T>& ParameterSet<T>::at(std::string_view name) const {
  const auto* e = find(name);
  if (e == nullptr) {
    throw Error(ErrorCode::invalid_argument, "no parameter named " + std::string(name));
  }
  return e->value;
}

template class ParameterSet<float>;
template class ParameterSet<double>;

namespace {
constexpr char kMagic[4] = {'I', 'C', 'P', 'S'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void save_parameters(const ParameterSet<float>& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  detail::write_le<std::uint16_t>(out, kVersion);
  detail::write_le<std::uint16_t>(out, 0);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& e : params.entries()) {
    detail::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.role));
    detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.value.rank()));
    for (auto extent : e.value.shape()) {
      detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(extent));
    }
    for (float v : e.value.values()) detail::write_le(out, v);
  }
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path.string());
}

ParameterSet<float> load_parameters(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open parameter file " + path.string());
  const std::string where = "parameter file " + path.string();
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, where + ": bad magic");
  }
  using detail::read_le_or_throw;
  const auto version = read_le_or_throw<std::uint16_t>(in, ErrorCode::truncated_payload, where);
  if (version != kVersion) {
    throw Error(ErrorCode::unsupported_version,
                where + ": unsupported version " + std::to_string(version));
  }
  read_le_or_throw<std::uint16_t>(in, ErrorCode::truncated_payload, where);
  const auto count = read_le_or_throw<std::uint32_t>(in, ErrorCode::truncated_payload, where);

  ParameterSet<float> params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_le_or_throw<std::uint16_t>(in, ErrorCode::truncated_payload, where);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw Error(ErrorCode::truncated_payload, where + ": truncated entry name");
    }
    const auto role = read_le_or_throw<std::uint8_t>(in, ErrorCode::truncated_payload, where);
    if (role > static_cast<std::uint8_t>(ParamRole::running_var)) {
      throw Error(ErrorCode::corrupt_artifact, where + ": unknown role for " + name);
    }
    const auto rank = read_le_or_throw<std::uint8_t>(in, ErrorCode::truncated_payload, where);
    Shape shape(rank);
    for (auto& extent : shape) {
      extent = read_le_or_throw<std::uint32_t>(in, ErrorCode::truncated_payload, where);
    }
    std::vector<float> values(element_count(shape));
    for (auto& v : values) v = read_le_or_throw<float>(in, ErrorCode::truncated_payload, where);
    params.add(std::move(name), static_cast<ParamRole>(role),
               Tensor<float>(std::move(shape), std::move(values)));
  }
  return params;
}

}  // namespace ictal
