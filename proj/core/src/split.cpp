#include "ictal/split.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "ictal/rng.hpp"

namespace ictal {

ValidationSplit split_train_validation(const Manifest& manifest, double fraction,
                                       std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "validation fraction must lie in (0, 1)");
  }
  const bool grouped = std::any_of(manifest.clips.begin(), manifest.clips.end(),
                                   [](const ClipRecord& c) {
                                     return c.split == Split::train && c.group.has_value();
                                   });
  const RngStream root(seed);
  std::vector<bool> chosen(manifest.clips.size(), false);
  ValidationSplit result;

  for (Label label : {Label::interictal, Label::preictal}) {
    // Units of clips that must move together, in first-seen order.
    std::vector<std::vector<std::size_t>> units;
    std::map<std::string, std::size_t> unit_of_group;
    std::size_t n_class = 0;
    for (std::size_t i = 0; i < manifest.clips.size(); ++i) {
      const auto& c = manifest.clips[i];
      if (c.split != Split::train || c.label != label) continue;
      ++n_class;
      if (grouped && c.group) {
        auto [it, inserted] = unit_of_group.emplace(*c.group, units.size());
        if (inserted) units.emplace_back();
        units[it->second].push_back(i);
      } else {
        units.push_back({i});
      }
    }
    // the nudge keeps e.g. 0.29 * 100 from flooring to 28
    const auto target = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(n_class) + 1e-9));
    if (target == 0) {
      if (n_class > 0) {
        result.warnings.push_back("class " + std::string(to_string(label)) +
                                  " gets no validation clips at fraction " +
                                  std::to_string(fraction));
      }
      continue;
    }
    auto rng = root.split(to_string(label));
    std::shuffle(units.begin(), units.end(), rng);
    std::size_t taken = 0;
    for (const auto& unit : units) {
      const auto gap_now = static_cast<long>(target) - static_cast<long>(taken);
      const auto gap_next = gap_now - static_cast<long>(unit.size());
      if (std::labs(gap_next) < std::labs(gap_now)) {
        for (auto i : unit) chosen[i] = true;
        taken += unit.size();
      }
      if (taken == target) break;
    }
    if (grouped && taken != target) {
      result.warnings.push_back("class " + std::string(to_string(label)) + ": " +
                                std::to_string(taken) + " validation clips instead of " +
                                std::to_string(target) + " to keep groups whole");
    }
  }

  for (auto* m : {&result.train, &result.validation}) {
    m->base_dir = manifest.base_dir;
    m->preprocessed = manifest.preprocessed;
    m->layouts = manifest.layouts;
  }
  for (std::size_t i = 0; i < manifest.clips.size(); ++i) {
    if (chosen[i]) {
      auto record = manifest.clips[i];
      record.split = Split::validation;
      result.validation.clips.push_back(std::move(record));
    } else {
      result.train.clips.push_back(manifest.clips[i]);
    }
  }
  return result;
}

}  // namespace ictal
