#include "ictal/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ictal {

std::vector<double> lowpass_taps(std::size_t taps, double cutoff_hz, double rate_hz) {
  if (taps == 0 || taps % 2 == 0) {
    throw Error(ErrorCode::invalid_argument, "low-pass filter needs an odd tap count");
  }
  if (!(cutoff_hz > 0.0 && cutoff_hz < rate_hz / 2.0)) {
    throw Error(ErrorCode::invalid_argument, "cutoff must lie below the Nyquist frequency");
  }
  const double fc = cutoff_hz / rate_hz;  // cycles per sample
  const auto half = static_cast<std::ptrdiff_t>(taps / 2);
  std::vector<double> h(taps);
  double sum = 0.0;
  for (std::ptrdiff_t i = -half; i <= half; ++i) {
    const double x = static_cast<double>(i);
    const double sinc = i == 0 ? 2.0 * fc
                               : std::sin(2.0 * std::numbers::pi * fc * x) / (std::numbers::pi * x);
    const double window = 0.54 + 0.46 * std::cos(std::numbers::pi * x / static_cast<double>(half));
    h[static_cast<std::size_t>(i + half)] = sinc * window;
    sum += sinc * window;
  }
  for (auto& v : h) v /= sum;
  return h;
}

Clip decimate(const Clip& clip, DecimationMode mode) {
  if (clip.sample_rate_hz != kIngestRateHz) {
    throw Error(ErrorCode::invalid_argument, "decimate expects a 400 Hz clip, got " +
                                                 std::to_string(clip.sample_rate_hz) + " Hz");
  }
  const std::size_t n = clip.length();
  if (n % 2 != 0) {
    throw Error(ErrorCode::invalid_argument, "decimate needs an even sample count, got " +
                                                 std::to_string(n));
  }
  const std::size_t out_n = n / 2;
  Clip out;
  out.subject_id = clip.subject_id;
  out.label = clip.label;
  out.split = clip.split;
  out.sample_rate_hz = clip.sample_rate_hz / 2.0f;
  out.samples = Tensor<float>(Shape{clip.channels(), out_n});

  if (mode == DecimationMode::naive) {
    for (std::size_t c = 0; c < clip.channels(); ++c) {
      const float* src = clip.samples.data() + c * n;
      float* dst = out.samples.data() + c * out_n;
      for (std::size_t i = 0; i < out_n; ++i) dst[i] = src[2 * i];
    }
    return out;
  }

  const auto taps = lowpass_taps(kLowpassTaps, kLowpassCutoffHz, kIngestRateHz);
  const auto half = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const auto len = static_cast<std::ptrdiff_t>(n);
  // Symmetric padding repeats the edge sample: x[-1] = x[0], x[n] = x[n-1].
  auto mirror = [len](std::ptrdiff_t i) {
    while (i < 0 || i >= len) i = i < 0 ? -1 - i : 2 * len - 1 - i;
    return i;
  };
  for (std::size_t c = 0; c < clip.channels(); ++c) {
    const float* src = clip.samples.data() + c * n;
    float* dst = out.samples.data() + c * out_n;
    for (std::size_t i = 0; i < out_n; ++i) {
      const auto center = static_cast<std::ptrdiff_t>(2 * i);
      double acc = 0.0;
      if (center - half >= 0 && center + half < len) {
        const float* x = src + (center - half);
        for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * x[k];
      } else {
        for (std::ptrdiff_t k = -half; k <= half; ++k) {
          acc += taps[static_cast<std::size_t>(k + half)] * src[mirror(center + k)];
        }
      }
      dst[i] = static_cast<float>(acc);
    }
  }
  return out;
}

Clip znormalize(Clip clip) {
  const std::size_t n = clip.length();
  for (std::size_t c = 0; c < clip.channels(); ++c) {
    float* x = clip.samples.data() + c * n;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x[i];
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - mean;
      sq += d * d;
    }
    const double sd = std::max(std::sqrt(sq / static_cast<double>(n)), kVarianceFloor);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<float>((x[i] - mean) / sd);
  }
  return clip;
}

Clip preprocess(const Clip& clip, const PreprocessOptions& options) {
  return znormalize(decimate(clip, options.decimation));
}

SegmentBatch segment(const Clip& clip, std::size_t clip_id, std::size_t* dropped_samples) {
  if (clip.channels() != kClipChannels) {
    throw Error(ErrorCode::shape_mismatch,
                "segment expects 16 channels, got " + std::to_string(clip.channels()));
  }
  const std::size_t n = clip.length();
  const std::size_t count = n / kSegmentLength;
  if (dropped_samples != nullptr) *dropped_samples += n % kSegmentLength;
  if (count == 0) {
    throw Error(ErrorCode::invalid_argument, "clip shorter than one 3000-sample segment");
  }
  SegmentBatch batch;
  batch.segments = Tensor<float>(Shape{count, kClipChannels, kSegmentLength});
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t c = 0; c < kClipChannels; ++c) {
      const float* src = clip.samples.data() + c * n + s * kSegmentLength;
      std::copy(src, src + kSegmentLength,
                batch.segments.data() + (s * kClipChannels + c) * kSegmentLength);
    }
  }
  batch.labels.assign(count, static_cast<std::uint8_t>(clip.label));
  batch.clip_ids.assign(count, clip_id);
  return batch;
}

SegmentBatch SegmentBatch::concat(const std::vector<SegmentBatch>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  SegmentBatch out;
  if (total == 0) return out;
  const std::size_t per = kClipChannels * kSegmentLength;
  std::vector<float> values;
  values.reserve(total * per);
  for (const auto& p : parts) {
    values.insert(values.end(), p.segments.values().begin(), p.segments.values().end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.clip_ids.insert(out.clip_ids.end(), p.clip_ids.begin(), p.clip_ids.end());
  }
  out.segments = Tensor<float>(Shape{total, kClipChannels, kSegmentLength}, std::move(values));
  return out;
}

}  // namespace ictal
