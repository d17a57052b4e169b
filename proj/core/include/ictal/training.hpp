#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ictal/layout.hpp"
#include "ictal/network.hpp"
#include "ictal/preprocess.hpp"
#include "ictal/topology.hpp"

namespace ictal {

enum class ClassWeighting { balanced, none };

std::string_view to_string(ClassWeighting mode);
ClassWeighting parse_class_weighting(std::string_view text);

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double l1 = 1e-9;
  double l2 = 1e-9;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  std::string topology = "nv1x16";
  ClassWeighting class_weighting = ClassWeighting::balanced;

  // Throws config_error.
  void validate() const;

  // JSON object with one key per field. Missing keys keep their defaults;
  // unknown keys and wrong types are config errors.
  std::string to_json_text() const;
  static TrainConfig from_json_text(const std::string& text);
  static TrainConfig load(const std::filesystem::path& path);

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ClassWeights {
  double positive = 1.0;
  double negative = 1.0;
};

// w_c = (n_pos + n_neg) / (2 n_c). Throws degenerate_training_set on a zero count.
ClassWeights class_weights(std::size_t n_preictal, std::size_t n_interictal);

inline constexpr double kProbabilityClamp = 1e-7;

// -[w_pos y ln p + w_neg (1 - y) ln(1 - p)] with p clamped to [1e-7, 1 - 1e-7].
double weighted_bce(double p, int y, double w_pos, double w_neg);

template <typename T>
struct Regularization {
  double penalty = 0.0;
  ParameterSet<T> gradient;  // one entry per weight-role parameter
};

// l1 sum|w| + l2 sum w^2 over weight-role parameters only; gradient
// l1 sign(w) + 2 l2 w with sign(0) = 0.
template <typename T>
Regularization<T> regularization(const ParameterSet<T>& params, double l1, double l2);

// Same penalty over live views; adds the gradient into each view's grad.
template <typename T>
double add_regularization(std::span<const ParamView<T>> views, double l1, double l2);

template <typename T>
struct AdamState {
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  std::uint64_t t = 0;
};

// One update over every trainable view (those with a grad). The state is
// sized on first use and must afterwards see the same views in order.
template <typename T>
void adam_step(std::span<const ParamView<T>> views, AdamState<T>& state, const TrainConfig& cfg);

enum class LossReduction { mean, sum };

struct BatchLoss {
  double data = 0.0;     // weighted BCE, reduced
  double penalty = 0.0;  // regularization
  double total() const { return data + penalty; }
};

/// Forward + backward of one batch. Leaves d(total)/d(parameter) in the
/// network's parameter gradients. `input` must already be on the topology
/// grid; labels are 0 or 1.
template <typename T>
BatchLoss compute_batch_gradients(Network<T>& net, const Tensor<T>& input,
                                  std::span<const std::uint8_t> labels, ClassWeights weights,
                                  double l1, double l2, Mode mode, RngStream* rng,
                                  LossReduction reduction = LossReduction::mean);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::optional<double> test_auc;
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Per-epoch training curve; CSV columns epoch,mean_loss,test_auc (the last
/// left empty when not measured).
struct RunHistory {
  std::vector<EpochRecord> epochs;

  std::size_t size() const noexcept { return epochs.size(); }
  std::string to_csv() const;
  static RunHistory from_csv(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static RunHistory load(const std::filesystem::path& path);
  friend bool operator==(const RunHistory&, const RunHistory&) = default;
};

struct FitOptions {
  // Called after each epoch with the current parameters; a returned value
  // is stored as that epoch's test AUC. Reporting only.
  std::function<std::optional<double>(std::size_t epoch, const ParameterSet<float>&)>
      epoch_observer;
  std::ostream* log = nullptr;
};

struct FitResult {
  ParameterSet<float> parameters;
  RunHistory history;
  ClassWeights weights;
};

/// Trains for exactly cfg.epochs epochs: per epoch the segment order is
/// reshuffled, batches run with batch norm in train mode and dropout on, and
/// Adam applies one step per batch. A final partial batch of one segment is
/// skipped. Throws single_class, non_finite_loss, config_error.
FitResult fit(const ModelSpec& spec, const ParameterSet<float>& initial,
              const ElectrodeLayout& layout, const SegmentBatch& train, const TrainConfig& cfg,
              const RngStream& rng, const FitOptions& options = {});

}  // namespace ictal
