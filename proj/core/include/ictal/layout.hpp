#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace ictal {

struct ElectrodePosition {
  std::uint8_t strip = 0;    // 0..3
  std::uint8_t contact = 0;  // 0..3 along the strip
  std::optional<std::uint8_t> hemisphere;  // 0|1 when the implant scheme is known

  friend bool operator==(const ElectrodePosition&, const ElectrodePosition&) = default;
};

/// Where each of the 16 recording channels sits in the implant: four 4-contact
/// strips, optionally grouped two per hemisphere.
///
/// Validation guarantees the (strip, contact) pairs tile the 4x4 grid. When
/// hemispheres are given they must be given for every channel, every strip
/// must lie in one hemisphere, and each hemisphere must carry two strips, so
/// (hemisphere, strip-within-hemisphere, contact) tiles the 2x2x4 grid.
class ElectrodeLayout {
 public:
  static constexpr std::size_t kChannels = 16;

  explicit ElectrodeLayout(std::array<ElectrodePosition, kChannels> positions);

  // Channel c on strip c / 4, contact c % 4; strips 0-1 left, 2-3 right.
  static ElectrodeLayout identity(bool with_hemispheres = true);

  const ElectrodePosition& channel(std::size_t c) const { return positions_.at(c); }
  bool has_hemispheres() const noexcept { return has_hemispheres_; }

  std::uint8_t strip_within_hemisphere(std::size_t c) const;
  // Row-major cell of channel c in the 4x4 (strip, contact) grid.
  std::size_t grid_index_4x4(std::size_t c) const;
  // Row-major cell of channel c in the 2x2x4 (hemisphere, strip, contact) grid.
  std::size_t grid_index_2x2x4(std::size_t c) const;

  std::string to_json_text() const;
  static ElectrodeLayout from_json_text(const std::string& text);
  static ElectrodeLayout load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  friend bool operator==(const ElectrodeLayout& a, const ElectrodeLayout& b) {
    return a.positions_ == b.positions_;
  }

 private:
  std::array<ElectrodePosition, kChannels> positions_;
  std::array<std::uint8_t, kChannels> strip_rank_{};
  bool has_hemispheres_ = false;
};

}  // namespace ictal
