#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ictal/tensor.hpp"

namespace ictal {

enum class Label : std::uint8_t { interictal = 0, preictal = 1, unknown = 255 };
enum class Split { train, test, validation };

std::string_view to_string(Label label);
std::string_view to_string(Split split);
Label parse_label(std::string_view text);
Split parse_split(std::string_view text);

inline constexpr float kIngestRateHz = 400.0f;
inline constexpr float kModelRateHz = 200.0f;
inline constexpr std::size_t kClipChannels = 16;

/// One labeled multichannel recording window. samples is (channels, n) with
/// each channel contiguous. subject_id and split come from the manifest; the
/// clip file itself stores rate, label and samples.
struct Clip {
  std::string subject_id;
  Label label = Label::unknown;
  Split split = Split::train;
  float sample_rate_hz = kIngestRateHz;
  Tensor<float> samples;

  std::size_t channels() const { return samples.dim(0); }
  std::size_t length() const { return samples.dim(1); }
};

/// Clip file, little-endian:
///   "ICLP" | u16 version = 1 | u16 n_channels | u32 n_samples |
///   f32 sample_rate_hz | u8 label | u8 reserved |
///   n_channels * n_samples f32, channel-major
void save_clip(const Clip& clip, const std::filesystem::path& path);

// Errors: bad_magic, unsupported_version, truncated_payload (payload shorter
// than the header claims), corrupt_artifact (trailing bytes, zero extents,
// unknown label byte), io_error.
Clip load_clip(const std::filesystem::path& path);

}  // namespace ictal
