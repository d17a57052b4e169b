#pragma once

#include <cstdint>
#include <vector>

#include "ictal/clip.hpp"

namespace ictal {

enum class DecimationMode { filtered, naive };

struct PreprocessOptions {
  DecimationMode decimation = DecimationMode::filtered;
};

inline constexpr std::size_t kLowpassTaps = 101;
inline constexpr double kLowpassCutoffHz = 80.0;
inline constexpr double kVarianceFloor = 1e-8;
inline constexpr std::size_t kSegmentLength = 3000;  // 15 s at 200 Hz

// Hamming-windowed sinc low-pass, normalized to unit DC gain.
std::vector<double> lowpass_taps(std::size_t taps, double cutoff_hz, double rate_hz);

/// Halves the sample rate (400 -> 200 Hz). Filtered mode runs the 101-tap,
/// 80 Hz zero-phase FIR with symmetric (edge-repeating) padding and keeps
/// samples 0, 2, 4, ...; naive mode only keeps every second sample.
Clip decimate(const Clip& clip, DecimationMode mode = DecimationMode::filtered);

// Per channel: x <- (x - mean) / max(std, 1e-8), over the whole clip.
Clip znormalize(Clip clip);

// decimate -> znormalize; the fixed order applied to every ingested clip.
Clip preprocess(const Clip& clip, const PreprocessOptions& options = {});

/// Preprocessed 15 s units: segments is (n, 16, 3000); labels hold 0, 1 or
/// 255 (unknown) per segment; clip_ids map each segment to its source clip.
struct SegmentBatch {
  Tensor<float> segments;
  std::vector<std::uint8_t> labels;
  std::vector<std::size_t> clip_ids;

  std::size_t size() const noexcept { return labels.size(); }

  static SegmentBatch concat(const std::vector<SegmentBatch>& parts);
};

// Non-overlapping 3000-sample windows in temporal order. A trailing
// remainder is dropped and its length added to *dropped_samples.
SegmentBatch segment(const Clip& clip, std::size_t clip_id,
                     std::size_t* dropped_samples = nullptr);

}  // namespace ictal
