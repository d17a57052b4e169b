#pragma once

#include <span>
#include <string>
#include <vector>

#include "ictal/manifest.hpp"
#include "ictal/preprocess.hpp"

namespace ictal {

/// One clip after decimation, normalization and segmentation.
struct PreparedClip {
  std::string clip_id;  // manifest path, generic form
  Label label = Label::unknown;
  SegmentBatch segments;
};

// Loads every clip of (subject, split) in manifest order and preprocesses it
// unless the manifest is already preprocessed. Clip ids in the segment
// batches are positions in the returned list.
std::vector<PreparedClip> prepare_clips(const Manifest& manifest, const std::string& subject,
                                        Split split);

// Concatenates the segments of all clips; clip_ids index into `clips`.
SegmentBatch stack_segments(std::span<const PreparedClip> clips);

}  // namespace ictal
