#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ictal/dataset.hpp"
#include "ictal/topology.hpp"

namespace ictal {

// Arithmetic mean; throws invalid_argument on an empty list.
double aggregate_clip(std::span<const double> segment_probabilities);

struct RocPoint {
  double threshold;  // predict positive when score >= threshold
  double fpr;
  double tpr;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// ROC over all distinct score thresholds, from (0, 0) to (1, 1). Labels
/// are 0 or 1; throws single_class when one class is absent.
std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const std::uint8_t> labels);

/// Trapezoidal area under roc_curve. Tied scores form one diagonal step, so
/// a tie between classes counts one half.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct ClipPrediction {
  std::string clip_id;
  Label label = Label::unknown;
  std::vector<double> segment_probabilities;
  double clip_probability = 0.0;
  friend bool operator==(const ClipPrediction&, const ClipPrediction&) = default;
};

struct EvaluationReport {
  std::string subject;
  std::string topology;
  std::uint64_t seed = 0;
  Split split = Split::test;
  std::vector<ClipPrediction> clips;
  std::vector<RocPoint> roc;
  double auc = 0.0;
  std::size_t n_preictal = 0;
  std::size_t n_interictal = 0;

  // AUC from the stored clip probabilities and labels.
  double recompute_auc() const;
  std::string roc_csv() const;
  std::string to_json_text() const;
  static EvaluationReport from_json_text(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static EvaluationReport load(const std::filesystem::path& path);
  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

/// Maps preprocessed segments to preictal probabilities.
class SegmentPredictor {
 public:
  virtual ~SegmentPredictor() = default;
  virtual std::vector<double> predict(const SegmentBatch& batch) = 0;
  virtual const ElectrodeLayout& layout() const = 0;
  virtual std::string topology_name() const = 0;
};

// Inference-mode network: batch norm uses running statistics, dropout is off.
class NetworkPredictor final : public SegmentPredictor {
 public:
  NetworkPredictor(const ModelSpec& spec, const ParameterSet<float>& params,
                   ElectrodeLayout layout, std::size_t batch_size = 32);
  std::vector<double> predict(const SegmentBatch& batch) override;
  const ElectrodeLayout& layout() const override { return layout_; }
  std::string topology_name() const override { return std::string(to_string(topology_)); }

 private:
  Topology topology_;
  ElectrodeLayout layout_;
  Network<float> net_;
  std::size_t batch_size_;
};

/// Predicts every clip, averages its segments and computes ROC/AUC over the
/// labeled ones. Metadata fields of the report are left for the caller.
EvaluationReport score_clips(SegmentPredictor& predictor, std::span<const PreparedClip> clips);

/// Scores every labeled clip of one subject and split: preprocess (unless
/// the manifest is already preprocessed), segment, predict, average per clip,
/// ROC/AUC over clips. Throws layout_mismatch when the subject's layout
/// differs from the predictor's, single_class when the split lacks a class.
EvaluationReport evaluate_subject(SegmentPredictor& predictor, const Manifest& manifest,
                                  const std::string& subject, Split split,
                                  std::uint64_t seed = 0);

struct BoxStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
  friend bool operator==(const BoxStats&, const BoxStats&) = default;
};

// Quartiles by linear interpolation between order statistics at (n - 1) q.
BoxStats box_stats(std::span<const double> values);

inline constexpr std::string_view kQuartileMethod = "linear";

struct RunAggregate {
  std::string subject;
  std::string topology;
  std::vector<std::uint64_t> seeds;  // sorted; aucs[i] belongs to seeds[i]
  std::vector<double> aucs;
  BoxStats stats;
};

// Reports must share subject and topology; throws invalid_argument otherwise
// or when empty.
RunAggregate aggregate_runs(std::span<const EvaluationReport> reports);

}  // namespace ictal
