#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ictal/clip.hpp"
#include "ictal/layout.hpp"

namespace ictal {

struct ClipRecord {
  std::filesystem::path path;  // relative paths resolve against the manifest directory
  std::string subject;
  Label label = Label::unknown;
  Split split = Split::train;
  std::optional<std::string> group;  // seizure/interictal group tag

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

/// Clip inventory for one or more subjects, stored as JSON:
///
///   { "format": "ictal-manifest", "version": 1, "preprocessed": false,
///     "subjects": { "<id>": { "layout": "<path>" } },
///     "clips": [ { "path": ..., "subject": ..., "label": ..., "split": ...,
///                  "group": ... (optional) } ] }
///
/// `preprocessed` marks clips that were already decimated and normalized.
struct Manifest {
  std::filesystem::path base_dir;
  bool preprocessed = false;
  std::map<std::string, std::filesystem::path> layouts;
  std::vector<ClipRecord> clips;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  bool has_subject(const std::string& subject) const;
  std::vector<std::string> subjects() const;
  std::vector<ClipRecord> select(const std::string& subject, Split split) const;
  ElectrodeLayout layout_for(const std::string& subject) const;

  // Unique paths, known subjects, labels present on train clips.
  void validate() const;
};

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

// Loads a clip and attaches subject/split from its record. The label byte in
// the file must agree with the record unless one of them is unknown.
Clip load_record(const Manifest& manifest, const ClipRecord& record);

}  // namespace ictal
