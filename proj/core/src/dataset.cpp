#include "ictal/dataset.hpp"

namespace ictal {

std::vector<PreparedClip> prepare_clips(const Manifest& manifest, const std::string& subject,
                                        Split split) {
  if (!manifest.has_subject(subject)) {
    throw Error(ErrorCode::unknown_subject, "unknown subject '" + subject + "'");
  }
  std::vector<PreparedClip> out;
  for (const auto& record : manifest.select(subject, split)) {
    Clip clip = load_record(manifest, record);
    if (!manifest.preprocessed) {
      clip = preprocess(clip);
    } else if (clip.sample_rate_hz != kModelRateHz) {
      throw Error(ErrorCode::invalid_manifest,
                  "manifest marked preprocessed but " + record.path.string() + " is not 200 Hz");
    }
    PreparedClip prepared;
    prepared.clip_id = record.path.generic_string();
    prepared.label = record.label;
    prepared.segments = segment(clip, out.size());
    if (prepared.segments.size() == 0) {
      throw Error(ErrorCode::invalid_argument,
                  "clip " + record.path.string() + " is shorter than one segment");
    }
    out.push_back(std::move(prepared));
  }
  return out;
}

SegmentBatch stack_segments(std::span<const PreparedClip> clips) {
  std::vector<SegmentBatch> parts;
  parts.reserve(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    SegmentBatch part = clips[i].segments;
    for (auto& id : part.clip_ids) id = i;
    parts.push_back(std::move(part));
  }
  return SegmentBatch::concat(parts);
}

}  // namespace ictal
