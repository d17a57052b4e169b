#include "ictal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace ictal {

double aggregate_clip(std::span<const double> segment_probabilities) {
  if (segment_probabilities.empty()) {
    throw Error(ErrorCode::invalid_argument, "cannot aggregate an empty segment list");
  }
  // summing in sorted order makes the result independent of segment order
  std::vector<double> sorted(segment_probabilities.begin(), segment_probabilities.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double p : sorted) sum += p;
  return sum / static_cast<double>(sorted.size());
}

namespace {

struct TieGroup {
  double score;
  std::uint64_t pos;
  std::uint64_t neg;
};

// Distinct scores in descending order with per-class counts.
std::vector<TieGroup> tie_groups(std::span<const double> scores,
                                 std::span<const std::uint8_t> labels, std::uint64_t& n_pos,
                                 std::uint64_t& n_neg) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::shape_mismatch, "scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] > 1) throw Error(ErrorCode::invalid_argument, "ROC labels must be 0 or 1");
    if (std::isnan(scores[i])) throw Error(ErrorCode::invalid_argument, "NaN score");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<TieGroup> groups;
  n_pos = n_neg = 0;
  for (auto i : order) {
    if (groups.empty() || groups.back().score != scores[i]) groups.push_back({scores[i], 0, 0});
    if (labels[i] == 1) {
      ++groups.back().pos;
      ++n_pos;
    } else {
      ++groups.back().neg;
      ++n_neg;
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::single_class, "ROC needs both classes (positives " +
                                             std::to_string(n_pos) + ", negatives " +
                                             std::to_string(n_neg) + ")");
  }
  return groups;
}

}  // namespace

std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const std::uint8_t> labels) {
  std::uint64_t n_pos = 0, n_neg = 0;
  const auto groups = tie_groups(scores, labels, n_pos, n_neg);
  std::vector<RocPoint> points{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  std::uint64_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.pos;
    fp += g.neg;
    points.push_back({g.score, static_cast<double>(fp) / static_cast<double>(n_neg),
                      static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  return points;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::uint64_t n_pos = 0, n_neg = 0;
  const auto groups = tie_groups(scores, labels, n_pos, n_neg);
  // Twice the trapezoid area in units of one (1/n_neg, 1/n_pos) cell, kept
  // integral so the only rounding is the final division.
  std::uint64_t twice_area = 0;
  std::uint64_t tp = 0;
  for (const auto& g : groups) {
    twice_area += g.neg * (2 * tp + g.pos);
    tp += g.pos;
  }
  return static_cast<double>(twice_area) / (2.0 * static_cast<double>(n_pos) *
                                            static_cast<double>(n_neg));
}

double EvaluationReport::recompute_auc() const {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (const auto& c : clips) {
    if (c.label == Label::unknown) continue;
    scores.push_back(c.clip_probability);
    labels.push_back(static_cast<std::uint8_t>(c.label));
  }
  return roc_auc(scores, labels);
}

std::string EvaluationReport::roc_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : roc) {
    if (std::isinf(p.threshold)) out << "inf";
    else out << p.threshold;
    out << ',' << p.fpr << ',' << p.tpr << '\n';
  }
  return out.str();
}

std::string EvaluationReport::to_json_text() const {
  nlohmann::ordered_json j;
  j["format"] = "ictal-evaluation";
  j["version"] = 1;
  j["subject"] = subject;
  j["topology"] = topology;
  j["seed"] = seed;
  j["split"] = std::string(to_string(split));
  j["auc"] = auc;
  j["n_preictal"] = n_preictal;
  j["n_interictal"] = n_interictal;
  auto& roc_json = j["roc"] = nlohmann::ordered_json::array();
  for (const auto& p : roc) {
    nlohmann::ordered_json point;
    point["threshold"] = std::isinf(p.threshold) ? nlohmann::ordered_json(nullptr)
                                                 : nlohmann::ordered_json(p.threshold);
    point["fpr"] = p.fpr;
    point["tpr"] = p.tpr;
    roc_json.push_back(std::move(point));
  }
  auto& clips_json = j["clips"] = nlohmann::ordered_json::array();
  for (const auto& c : clips) {
    nlohmann::ordered_json entry;
    entry["clip_id"] = c.clip_id;
    entry["label"] = std::string(to_string(c.label));
    entry["clip_probability"] = c.clip_probability;
    entry["segment_probabilities"] = c.segment_probabilities;
    clips_json.push_back(std::move(entry));
  }
  return j.dump(2) + "\n";
}

EvaluationReport EvaluationReport::from_json_text(const std::string& text) {
  EvaluationReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "ictal-evaluation" || j.at("version") != 1) {
      throw Error(ErrorCode::corrupt_artifact, "not an evaluation report");
    }
    r.subject = j.at("subject").get<std::string>();
    r.topology = j.at("topology").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.split = parse_split(j.at("split").get<std::string>());
    r.auc = j.at("auc").get<double>();
    r.n_preictal = j.at("n_preictal").get<std::size_t>();
    r.n_interictal = j.at("n_interictal").get<std::size_t>();
    for (const auto& p : j.at("roc")) {
      const auto& t = p.at("threshold");
      r.roc.push_back({t.is_null() ? std::numeric_limits<double>::infinity() : t.get<double>(),
                       p.at("fpr").get<double>(), p.at("tpr").get<double>()});
    }
    for (const auto& c : j.at("clips")) {
      ClipPrediction pred;
      pred.clip_id = c.at("clip_id").get<std::string>();
      pred.label = parse_label(c.at("label").get<std::string>());
      pred.clip_probability = c.at("clip_probability").get<double>();
      pred.segment_probabilities = c.at("segment_probabilities").get<std::vector<double>>();
      r.clips.push_back(std::move(pred));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::corrupt_artifact, std::string("evaluation report: ") + e.what());
  }
  return r;
}

void EvaluationReport::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  out << to_json_text();
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
}

EvaluationReport EvaluationReport::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

NetworkPredictor::NetworkPredictor(const ModelSpec& spec, const ParameterSet<float>& params,
                                   ElectrodeLayout layout, std::size_t batch_size)
    : topology_(spec.topology),
      layout_(std::move(layout)),
      net_(instantiate<float>(spec, params)),
      batch_size_(std::max<std::size_t>(1, batch_size)) {}

std::vector<double> NetworkPredictor::predict(const SegmentBatch& batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < batch.size(); start += batch_size_) {
    const std::size_t count = std::min(batch_size_, batch.size() - start);
    idx.resize(count);
    std::iota(idx.begin(), idx.end(), start);
    const auto probs = net_.predict(network_input<float>(batch.segments, idx, topology_, layout_));
    for (std::size_t i = 0; i < count; ++i) out.push_back(probs[i]);
  }
  return out;
}

EvaluationReport score_clips(SegmentPredictor& predictor, std::span<const PreparedClip> clips) {
  EvaluationReport report;
  report.topology = predictor.topology_name();
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (const auto& clip : clips) {
    ClipPrediction pred;
    pred.clip_id = clip.clip_id;
    pred.label = clip.label;
    pred.segment_probabilities = predictor.predict(clip.segments);
    pred.clip_probability = aggregate_clip(pred.segment_probabilities);
    if (clip.label != Label::unknown) {
      scores.push_back(pred.clip_probability);
      labels.push_back(static_cast<std::uint8_t>(clip.label));
      (clip.label == Label::preictal ? report.n_preictal : report.n_interictal) += 1;
    }
    report.clips.push_back(std::move(pred));
  }
  report.roc = roc_curve(scores, labels);
  report.auc = roc_auc(scores, labels);
  return report;
}

EvaluationReport evaluate_subject(SegmentPredictor& predictor, const Manifest& manifest,
                                  const std::string& subject, Split split, std::uint64_t seed) {
  if (!manifest.has_subject(subject)) {
    throw Error(ErrorCode::unknown_subject, "unknown subject '" + subject + "'");
  }
  if (manifest.layout_for(subject) != predictor.layout()) {
    throw Error(ErrorCode::layout_mismatch, "electrode layout of subject '" + subject +
                                                "' differs from the model's layout");
  }
  const auto clips = prepare_clips(manifest, subject, split);
  EvaluationReport report = score_clips(predictor, clips);
  report.subject = subject;
  report.seed = seed;
  report.split = split;
  return report;
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "box statistics of nothing");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  BoxStats s;
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

RunAggregate aggregate_runs(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::invalid_argument, "no reports to aggregate");
  RunAggregate agg;
  agg.subject = reports.front().subject;
  agg.topology = reports.front().topology;
  std::vector<std::pair<std::uint64_t, double>> runs;
  for (const auto& r : reports) {
    if (r.subject != agg.subject || r.topology != agg.topology) {
      throw Error(ErrorCode::invalid_argument, "reports mix subjects or topologies");
    }
    runs.emplace_back(r.seed, r.auc);
  }
  std::sort(runs.begin(), runs.end());
  for (const auto& [seed, auc] : runs) {
    agg.seeds.push_back(seed);
    agg.aucs.push_back(auc);
  }
  agg.stats = box_stats(agg.aucs);
  return agg;
}

}  // namespace ictal
