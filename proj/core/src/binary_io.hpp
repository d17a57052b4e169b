#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "ictal/error.hpp"

namespace ictal::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written with native little-endian stores");

template <typename T>
void write_le(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
bool read_le(std::istream& in, T& value) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) return false;
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

template <typename T>
T read_le_or_throw(std::istream& in, ErrorCode code, const std::string& what) {
  T value{};
  if (!read_le(in, value)) throw Error(code, what);
  return value;
}

}  // namespace ictal::detail
