#include "ictal/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace ictal {

std::string_view to_string(ClassWeighting mode) {
  return mode == ClassWeighting::balanced ? "balanced" : "none";
}

ClassWeighting parse_class_weighting(std::string_view text) {
  if (text == "balanced") return ClassWeighting::balanced;
  if (text == "none") return ClassWeighting::none;
  throw Error(ErrorCode::config_error, "unknown class weighting '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::config_error, what);
  };
  require(std::isfinite(learning_rate) && learning_rate > 0, "learning_rate must be > 0");
  require(beta1 > 0 && beta1 < 1, "beta1 must lie in (0, 1)");
  require(beta2 > 0 && beta2 < 1, "beta2 must lie in (0, 1)");
  require(std::isfinite(adam_epsilon) && adam_epsilon > 0, "adam_epsilon must be > 0");
  require(std::isfinite(l1) && l1 >= 0, "l1 must be >= 0");
  require(std::isfinite(l2) && l2 >= 0, "l2 must be >= 0");
  require(epochs >= 1, "epochs must be >= 1");
  require(batch_size >= 2, "batch_size must be >= 2 (batch norm needs two samples)");
  try {
    parse_topology(topology);
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what());
  }
}

std::string TrainConfig::to_json_text() const {
  nlohmann::ordered_json j;
  j["learning_rate"] = learning_rate;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["adam_epsilon"] = adam_epsilon;
  j["l1"] = l1;
  j["l2"] = l2;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["topology"] = topology;
  j["class_weighting"] = std::string(to_string(class_weighting));
  return j.dump(2) + "\n";
}

TrainConfig TrainConfig::from_json_text(const std::string& text) {
  TrainConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::config_error, "config must be a JSON object");
    auto number = [](const nlohmann::json& v, const std::string& key) {
      if (!v.is_number()) throw Error(ErrorCode::config_error, key + " must be a number");
      return v.get<double>();
    };
    auto count = [](const nlohmann::json& v, const std::string& key) {
      if (!v.is_number_unsigned()) {
        throw Error(ErrorCode::config_error, key + " must be a non-negative integer");
      }
      return v.get<std::uint64_t>();
    };
    for (const auto& [key, v] : j.items()) {
      if (key == "learning_rate") cfg.learning_rate = number(v, key);
      else if (key == "beta1") cfg.beta1 = number(v, key);
      else if (key == "beta2") cfg.beta2 = number(v, key);
      else if (key == "adam_epsilon") cfg.adam_epsilon = number(v, key);
      else if (key == "l1") cfg.l1 = number(v, key);
      else if (key == "l2") cfg.l2 = number(v, key);
      else if (key == "epochs") cfg.epochs = count(v, key);
      else if (key == "batch_size") cfg.batch_size = count(v, key);
      else if (key == "seed") cfg.seed = count(v, key);
      else if (key == "topology") {
        if (!v.is_string()) throw Error(ErrorCode::config_error, "topology must be a string");
        cfg.topology = v.get<std::string>();
      } else if (key == "class_weighting") {
        if (!v.is_string()) throw Error(ErrorCode::config_error, "class_weighting must be a string");
        cfg.class_weighting = parse_class_weighting(v.get<std::string>());
      } else {
        throw Error(ErrorCode::config_error, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("config parse error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

ClassWeights class_weights(std::size_t n_preictal, std::size_t n_interictal) {
  if (n_preictal == 0 || n_interictal == 0) {
    throw Error(ErrorCode::degenerate_training_set,
                "degenerate training set: class weights need both classes (preictal " +
                    std::to_string(n_preictal) + ", interictal " +
                    std::to_string(n_interictal) + ")");
  }
  const double total = static_cast<double>(n_preictal + n_interictal);
  return {total / (2.0 * static_cast<double>(n_preictal)),
          total / (2.0 * static_cast<double>(n_interictal))};
}

double weighted_bce(double p, int y, double w_pos, double w_neg) {
  const double q = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y == 1 ? -w_pos * std::log(q) : -w_neg * std::log(1.0 - q);
}

namespace {

template <typename T>
T sign(T x) {
  return static_cast<T>((x > 0) - (x < 0));
}

}  // namespace

template <typename T>
Regularization<T> regularization(const ParameterSet<T>& params, double l1, double l2) {
  Regularization<T> out;
  for (const auto& e : params.entries()) {
    if (!is_regularized(e.role)) continue;
    Tensor<T> g(e.value.shape());
    const auto w = e.value.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double x = w[i];
      out.penalty += l1 * std::abs(x) + l2 * x * x;
      g[i] = static_cast<T>(l1 * sign(x) + 2.0 * l2 * x);
    }
    out.gradient.add(e.name, e.role, std::move(g));
  }
  return out;
}

template <typename T>
double add_regularization(std::span<const ParamView<T>> views, double l1, double l2) {
  double penalty = 0.0;
  for (const auto& view : views) {
    if (!is_regularized(view.role) || view.grad == nullptr) continue;
    const auto w = view.value->values();
    auto g = view.grad->values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double x = w[i];
      penalty += l1 * std::abs(x) + l2 * x * x;
      g[i] += static_cast<T>(l1 * sign(x) + 2.0 * l2 * x);
    }
  }
  return penalty;
}

template <typename T>
void adam_step(std::span<const ParamView<T>> views, AdamState<T>& state, const TrainConfig& cfg) {
  std::vector<const ParamView<T>*> trainable;
  for (const auto& view : views) {
    if (view.grad != nullptr) trainable.push_back(&view);
  }
  if (state.m.empty()) {
    for (const auto* view : trainable) {
      state.m.emplace_back(view->value->shape());
      state.v.emplace_back(view->value->shape());
    }
  }
  if (state.m.size() != trainable.size()) {
    throw Error(ErrorCode::shape_mismatch, "Adam state does not match the parameter list");
  }
  ++state.t;
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t p = 0; p < trainable.size(); ++p) {
    const auto& view = *trainable[p];
    if (view.grad->shape() != view.value->shape() || state.m[p].shape() != view.value->shape()) {
      throw Error(ErrorCode::shape_mismatch, "gradient shape mismatch for " + view.name);
    }
    auto w = view.value->values();
    const auto g = view.grad->values();
    auto m = state.m[p].values();
    auto v = state.v[p].values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      const double mi = b1 * m[i] + (1.0 - b1) * gi;
      const double vi = b2 * v[i] + (1.0 - b2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double step = cfg.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + cfg.adam_epsilon);
      w[i] = static_cast<T>(w[i] - step);
    }
  }
}

template <typename T>
BatchLoss compute_batch_gradients(Network<T>& net, const Tensor<T>& input,
                                  std::span<const std::uint8_t> labels, ClassWeights weights,
                                  double l1, double l2, Mode mode, RngStream* rng,
                                  LossReduction reduction) {
  const std::size_t n = input.dim(0);
  if (labels.size() != n) {
    throw Error(ErrorCode::shape_mismatch, "label count does not match batch size");
  }
  const Tensor<T> probs = net.forward(input, mode, rng);
  if (probs.size() != n) {
    throw Error(ErrorCode::shape_mismatch, "network must emit one probability per segment");
  }
  const double scale = reduction == LossReduction::mean ? 1.0 / static_cast<double>(n) : 1.0;
  Tensor<T> dlogit(probs.shape());
  BatchLoss loss;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) {
      throw Error(ErrorCode::invalid_argument, "training labels must be 0 or 1");
    }
    const double w = y == 1 ? weights.positive : weights.negative;
    const double p = probs[i];
    loss.data += scale * weighted_bce(p, y, weights.positive, weights.negative);
    // d/dz of -w[y ln s(z) + (1-y) ln(1-s(z))] = w (s(z) - y)
    dlogit[i] = static_cast<T>(scale * w * (p - y));
  }
  net.backward_from_logits(dlogit);
  net.release_activations();
  const auto views = net.parameters();
  loss.penalty = add_regularization<T>(views, l1, l2);
  return loss;
}

namespace {

void append_double(std::string& out, double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::corrupt_artifact, "bad number in history: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string RunHistory::to_csv() const {
  std::string out = "epoch,mean_loss,test_auc\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch);
    out += ',';
    append_double(out, e.mean_loss);
    out += ',';
    if (e.test_auc) append_double(out, *e.test_auc);
    out += '\n';
  }
  return out;
}

RunHistory RunHistory::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "epoch,mean_loss,test_auc") {
    throw Error(ErrorCode::corrupt_artifact, "history: missing header");
  }
  RunHistory history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw Error(ErrorCode::corrupt_artifact, "history: bad row");
    EpochRecord rec;
    rec.epoch = static_cast<std::size_t>(parse_double(std::string_view(line).substr(0, c1)));
    rec.mean_loss = parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
    if (c2 + 1 < line.size()) rec.test_auc = parse_double(std::string_view(line).substr(c2 + 1));
    history.epochs.push_back(rec);
  }
  return history;
}

void RunHistory::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  out << to_csv();
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
}

RunHistory RunHistory::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_csv(buffer.str());
}

FitResult fit(const ModelSpec& spec, const ParameterSet<float>& initial,
              const ElectrodeLayout& layout, const SegmentBatch& train, const TrainConfig& cfg,
              const RngStream& rng, const FitOptions& options) {
  cfg.validate();
  std::size_t n_pos = 0, n_neg = 0;
  for (auto y : train.labels) {
    if (y == 1) ++n_pos;
    else if (y == 0) ++n_neg;
    else throw Error(ErrorCode::invalid_argument, "training segments must be labeled");
  }
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::single_class, "training set holds a single class (preictal " +
                                             std::to_string(n_pos) + ", interictal " +
                                             std::to_string(n_neg) + ")");
  }
  if (train.size() < 2) {
    throw Error(ErrorCode::degenerate_training_set, "need at least two training segments");
  }

  FitResult result;
  result.weights = cfg.class_weighting == ClassWeighting::balanced ? class_weights(n_pos, n_neg)
                                                                    : ClassWeights{};
  Network<float> net = instantiate<float>(spec, initial);
  const auto views = net.parameters();
  AdamState<float> adam;
  RngStream shuffle_rng = rng.split("shuffle");
  RngStream dropout_rng = rng.split("dropout");

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint8_t> labels;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - start);
      if (count < 2) break;
      const std::span<const std::size_t> idx(order.data() + start, count);
      const Tensor<float> input = network_input<float>(train.segments, idx, spec.topology, layout);
      labels.resize(count);
      for (std::size_t i = 0; i < count; ++i) labels[i] = train.labels[idx[i]];
      const BatchLoss loss = compute_batch_gradients<float>(
          net, input, labels, result.weights, cfg.l1, cfg.l2, Mode::train, &dropout_rng);
      if (!std::isfinite(loss.total())) {
        throw Error(ErrorCode::non_finite_loss,
                    "non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                        std::to_string(start) + " (data " + std::to_string(loss.data) +
                        ", penalty " + std::to_string(loss.penalty) + ")");
      }
      adam_step<float>(views, adam, cfg);
      loss_sum += loss.total() * static_cast<double>(count);
      seen += count;
    }
    EpochRecord rec{epoch, loss_sum / static_cast<double>(seen), std::nullopt};
    if (options.epoch_observer) {
      rec.test_auc = options.epoch_observer(epoch, net.export_parameters());
    }
    if (options.log != nullptr) {
      *options.log << "epoch " << epoch << "/" << cfg.epochs << " loss " << rec.mean_loss;
      if (rec.test_auc) *options.log << " test_auc " << *rec.test_auc;
      *options.log << '\n';
    }
    result.history.epochs.push_back(rec);
  }
  result.parameters = net.export_parameters();
  return result;
}

#define ICTAL_INSTANTIATE(T)                                                                  \
  template Regularization<T> regularization<T>(const ParameterSet<T>&, double, double);       \
  template double add_regularization<T>(std::span<const ParamView<T>>, double, double);       \
  template void adam_step<T>(std::span<const ParamView<T>>, AdamState<T>&, const TrainConfig&); \
  template BatchLoss compute_batch_gradients<T>(Network<T>&, const Tensor<T>&,                \
                                                std::span<const std::uint8_t>, ClassWeights,  \
                                                double, double, Mode, RngStream*, LossReduction);
ICTAL_INSTANTIATE(float)
ICTAL_INSTANTIATE(double)
#undef ICTAL_INSTANTIATE

}  // namespace ictal
