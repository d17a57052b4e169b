#include "ictal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace ictal {

std::size_t synthetic_clip_samples(const SyntheticConfig& config) {
  const double exact = config.clip_minutes * 60.0 * kIngestRateHz;
  const auto samples = static_cast<std::size_t>(std::llround(exact));
  if (!(config.clip_minutes > 0.0) || std::abs(exact - static_cast<double>(samples)) > 1e-9 ||
      samples % 2 != 0 || (samples / 2) % 3000 != 0) {
    throw Error(ErrorCode::invalid_argument,
                "clip duration must give an even 400 Hz length whose 200 Hz length is a "
                "multiple of 3000 (multiples of 0.25 min)");
  }
  return samples;
}

namespace {

// Paul Kellet's refined pink-noise filter; roughly -3 dB/octave over the band
// of interest.
class PinkNoise {
 public:
  double next(double white) {
    b_[0] = 0.99886 * b_[0] + white * 0.0555179;
    b_[1] = 0.99332 * b_[1] + white * 0.0750759;
    b_[2] = 0.96900 * b_[2] + white * 0.1538520;
    b_[3] = 0.86650 * b_[3] + white * 0.3104856;
    b_[4] = 0.55000 * b_[4] + white * 0.5329522;
    b_[5] = -0.7616 * b_[5] - white * 0.0168980;
    const double pink = b_[0] + b_[1] + b_[2] + b_[3] + b_[4] + b_[5] + b_[6] + white * 0.5362;
    b_[6] = white * 0.115926;
    return pink;
  }

 private:
  double b_[7] = {};
};

constexpr std::size_t kWarmup = 4000;

}  // namespace

Clip synthesize_clip(Label label, const SyntheticConfig& config, RngStream& rng) {
  if (label == Label::unknown) {
    throw Error(ErrorCode::invalid_argument, "synthetic clips need a known label");
  }
  const std::size_t n = synthetic_clip_samples(config);
  const double fs = kIngestRateHz;
  Clip clip;
  clip.label = label;
  clip.sample_rate_hz = kIngestRateHz;
  clip.samples = Tensor<float>(Shape{kClipChannels, n});

  std::vector<double> noise(n);
  std::vector<double> noise_sd(kClipChannels);
  std::vector<std::vector<double>> channels(kClipChannels);
  for (std::size_t c = 0; c < kClipChannels; ++c) {
    PinkNoise pink;
    for (std::size_t i = 0; i < kWarmup; ++i) pink.next(rng.normal());
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      noise[i] = pink.next(rng.normal());
      sum += noise[i];
    }
    const double mean = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) sq += (noise[i] - mean) * (noise[i] - mean);
    const double gain = rng.uniform(20.0, 80.0) / std::sqrt(sq / static_cast<double>(n));
    channels[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) channels[c][i] = gain * noise[i];
    noise_sd[c] = gain * std::sqrt(sq / static_cast<double>(n));
  }

  if (label == Label::preictal) {
    const std::size_t lo = std::min(config.min_burst_channels, kClipChannels);
    const std::size_t n_active = lo + rng.below(kClipChannels - lo + 1);
    std::vector<std::size_t> order(kClipChannels);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(n_active);

    const double freq = rng.uniform(config.burst_low_hz, config.burst_high_hz);
    const double amp_factor = std::sqrt(2.0) * std::pow(10.0, config.snr_db / 20.0);
    std::size_t t = static_cast<std::size_t>(rng.uniform(0.0, 2.0) * fs);
    while (t < n) {
      const auto len = static_cast<std::size_t>(rng.uniform(1.0, 3.0) * fs);
      const std::size_t end = std::min(n, t + len);
      const std::size_t taper = std::max<std::size_t>(1, (end - t) / 10);
      for (auto c : order) {
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double amp = amp_factor * noise_sd[c];
        for (std::size_t i = t; i < end; ++i) {
          const std::size_t k = std::min(i - t, end - 1 - i);
          const double env =
              k >= taper ? 1.0
                         : 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(k) /
                                                static_cast<double>(taper));
          channels[c][i] +=
              amp * env *
              std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs + phase);
        }
      }
      const double mean_gap = static_cast<double>(len) * (1.0 - config.duty_cycle) / config.duty_cycle;
      t = end + static_cast<std::size_t>(mean_gap * rng.uniform(0.5, 1.5));
    }
  }

  for (std::size_t c = 0; c < kClipChannels; ++c) {
    float* dst = clip.samples.data() + c * n;
    for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(channels[c][i]);
  }
  return clip;
}

Manifest generate_synthetic(const SyntheticConfig& config, const std::filesystem::path& out_dir) {
  synthetic_clip_samples(config);
  if (config.subjects == 0 || config.train_per_class == 0) {
    throw Error(ErrorCode::invalid_argument, "synthetic data needs >= 1 subject and training clip");
  }
  std::filesystem::create_directories(out_dir / "clips");
  Manifest manifest;
  manifest.base_dir = out_dir;
  const RngStream root(config.seed);

  for (std::size_t s = 0; s < config.subjects; ++s) {
    char id[32];
    std::snprintf(id, sizeof(id), "synth%02zu", s + 1);
    const std::string subject = id;
    const std::filesystem::path layout_file = subject + "_layout.json";
    ElectrodeLayout::identity(true).save(out_dir / layout_file);
    manifest.layouts[subject] = layout_file;

    for (Split split : {Split::train, Split::test}) {
      const std::size_t per_class =
          split == Split::train ? config.train_per_class : config.test_per_class;
      for (Label label : {Label::interictal, Label::preictal}) {
        for (std::size_t k = 0; k < per_class; ++k) {
          char name[96];
          std::snprintf(name, sizeof(name), "%s_%s_%s_%04zu.iclp", subject.c_str(),
                        std::string(to_string(split)).c_str(),
                        std::string(to_string(label)).c_str(), k);
          // One stream per clip so any clip can be regenerated on its own.
          auto rng = root.split(name);
          Clip clip = synthesize_clip(label, config, rng);
          clip.subject_id = subject;
          clip.split = split;
          const std::filesystem::path rel = std::filesystem::path("clips") / name;
          save_clip(clip, out_dir / rel);
          manifest.clips.push_back({rel, subject, label, split, std::nullopt});
        }
      }
    }
  }
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace ictal
