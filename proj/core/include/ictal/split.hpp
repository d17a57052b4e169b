#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ictal/manifest.hpp"

namespace ictal {

struct ValidationSplit {
  Manifest train;       // every clip not moved to validation, other splits included
  Manifest validation;  // moved clips, tagged Split::validation
  std::vector<std::string> warnings;
};

/// Carves a validation set out of the training clips.
///
/// Stratified by label: per class, floor(fraction * n_class) clips move. If
/// any eligible clip carries a group tag, whole (label, group) units move
/// together and the per-class count approximates the target as closely as
/// the group sizes allow; untagged clips count as groups of one. Selection
/// order is a pure function of `seed`.
ValidationSplit split_train_validation(const Manifest& manifest, double fraction,
                                       std::uint64_t seed);

}  // namespace ictal
