#pragma once

#include <cstdint>
#include <filesystem>

#include "ictal/clip.hpp"
#include "ictal/manifest.hpp"
#include "ictal/rng.hpp"

namespace ictal {

/// Desk-scale stand-in for real recordings.
///
/// Interictal clips are per-channel 1/f ("pink") noise with a random gain.
/// Preictal clips add band-limited bursts: one frequency per clip drawn from
/// [burst_low_hz, burst_high_hz], tapered bursts of 1-3 s covering about
/// duty_cycle of the clip, random phase per burst and channel, on a random
/// subset of at least min_burst_channels channels, with in-burst power set by
/// snr_db relative to that channel's noise power.
struct SyntheticConfig {
  std::size_t subjects = 1;
  std::size_t train_per_class = 80;
  std::size_t test_per_class = 20;
  double clip_minutes = 1.0;
  std::uint64_t seed = 0;
  double burst_low_hz = 18.0;
  double burst_high_hz = 24.0;
  double duty_cycle = 0.3;
  double snr_db = 0.0;
  std::size_t min_burst_channels = 8;
};

// Samples per clip at 400 Hz; throws unless it is even and the 200 Hz length
// is a positive multiple of 3000.
std::size_t synthetic_clip_samples(const SyntheticConfig& config);

Clip synthesize_clip(Label label, const SyntheticConfig& config, RngStream& rng);

/// Writes <out>/clips/*.iclp, one layout file per subject and
/// <out>/manifest.json; returns the manifest. Subjects are named synth01,
/// synth02, ... and get the identity layout with hemispheres.
Manifest generate_synthetic(const SyntheticConfig& config, const std::filesystem::path& out_dir);

}  // namespace ictal
