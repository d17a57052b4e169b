#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ictal/training.hpp"

namespace ictal::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3 };

// Parses argv and dispatches to a subcommand. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Contents of run.json: everything needed to re-evaluate a run directory.
struct RunManifest {
  std::filesystem::path run_dir;
  TrainConfig config;
  std::uint64_t seed = 0;
  std::string topology;
  std::string subject;
  std::filesystem::path data_manifest;  // absolute
  ElectrodeLayout layout = ElectrodeLayout::identity(false);
  ClassWeights class_weights;
  std::size_t train_segments = 0;
  std::string toolkit_version;
  std::string rng_algorithm;
  std::vector<std::pair<std::string, std::string>> artifacts;  // role -> file name

  std::string to_json_text() const;
  static RunManifest load(const std::filesystem::path& run_dir);
  void save() const;
  void set_artifact(const std::string& role, const std::string& file);
  std::optional<std::string> artifact(const std::string& role) const;
};

// "A..B" inclusive, or a single number.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

// Keeps large activation buffers on the heap instead of fresh mmaps per
// batch. No-op outside glibc.
void tune_allocator();

// Worker count for parallel seeds from ICTAL_WORKERS; 1 when unset.
std::size_t worker_count();

}  // namespace ictal::cli
