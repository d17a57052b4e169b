#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#ifdef __GLIBC__
#include <malloc.h>
#endif
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ictal/evaluation.hpp"
#include "ictal/split.hpp"
#include "ictal/synthetic.hpp"
#include "ictal/version.hpp"
#include "json.hpp"

namespace ictal::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kRunFile = "run.json";
constexpr const char* kParametersFile = "parameters.bin";
constexpr const char* kHistoryFile = "history.csv";
constexpr const char* kReportFile = "report.json";
constexpr const char* kRocFile = "roc.csv";

[[noreturn]] void config_fail(const std::string& message) {
  throw Error(ErrorCode::config_error, message);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_auc(double auc) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", auc);
  return buf;
}

// Outputs may not land inside the data directory they were derived from.
void ensure_outside(const fs::path& out, const fs::path& data_dir) {
  const auto o = fs::weakly_canonical(fs::absolute(out));
  const auto d = fs::weakly_canonical(fs::absolute(data_dir));
  auto oi = o.begin();
  for (auto di = d.begin(); di != d.end(); ++di, ++oi) {
    if (oi == o.end() || *oi != *di) return;
  }
  config_fail("refusing to write into the input data directory " + d.string());
}

Topology topology_or_config(const std::string& flag, const TrainConfig& cfg) {
  try {
    return parse_topology(flag.empty() ? cfg.topology : flag);
  } catch (const Error& e) {
    config_fail(e.what());
  }
}

Split split_flag(const std::string& text) {
  try {
    return parse_split(text);
  } catch (const Error& e) {
    config_fail(e.what());
  }
}

// Re-expresses every path of `m` relative to `new_base`.
Manifest rebased(const Manifest& m, const fs::path& new_base) {
  const auto base = fs::weakly_canonical(fs::absolute(new_base));
  auto rel = [&](const fs::path& p) {
    return fs::weakly_canonical(fs::absolute(m.resolve(p))).lexically_relative(base);
  };
  Manifest out = m;
  out.base_dir = new_base;
  for (auto& [id, layout] : out.layouts) layout = rel(layout);
  for (auto& clip : out.clips) clip.path = rel(clip.path);
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto number = [&](std::string_view part) {
    std::uint64_t value = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size()) {
      config_fail("bad seed range '" + text + "' (expected N or A..B)");
    }
    return value;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {number(text)};
  const auto a = number(std::string_view(text).substr(0, dots));
  const auto b = number(std::string_view(text).substr(dots + 2));
  if (b < a) config_fail("seed range '" + text + "' is empty");
  if (b - a >= 10000) config_fail("seed range '" + text + "' is too large");
  std::vector<std::uint64_t> seeds;
  for (auto s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

void tune_allocator() {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

std::size_t worker_count() {
  const char* value = std::getenv("ICTAL_WORKERS");
  if (value == nullptr || *value == '\0') return 1;
  std::size_t n = 0;
  const std::string_view text(value);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), n);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || n == 0) {
    config_fail("ICTAL_WORKERS must be a positive integer");
  }
  return n;
}

std::string RunManifest::to_json_text() const {
  ordered_json j;
  j["format"] = "ictal-run";
  j["version"] = 1;
  j["toolkit_version"] = toolkit_version;
  j["rng_algorithm"] = rng_algorithm;
  j["subject"] = subject;
  j["topology"] = topology;
  j["seed"] = seed;
  j["data_manifest"] = data_manifest.generic_string();
  j["config"] = ordered_json::parse(config.to_json_text());
  j["layout"] = ordered_json::parse(layout.to_json_text());
  j["class_weights"] = {{"preictal", class_weights.positive},
                        {"interictal", class_weights.negative}};
  j["train_segments"] = train_segments;
  ordered_json a = ordered_json::object();
  for (const auto& [role, file] : artifacts) a[role] = file;
  j["artifacts"] = a;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::load(const fs::path& run_dir) {
  RunManifest m;
  m.run_dir = run_dir;
  const auto text = read_text(run_dir / kRunFile);
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "ictal-run" || j.at("version") != 1) {
      throw Error(ErrorCode::corrupt_artifact, "not a run manifest");
    }
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    m.rng_algorithm = j.at("rng_algorithm").get<std::string>();
    m.subject = j.at("subject").get<std::string>();
    m.topology = j.at("topology").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.data_manifest = j.at("data_manifest").get<std::string>();
    m.config = TrainConfig::from_json_text(j.at("config").dump());
    m.layout = ElectrodeLayout::from_json_text(j.at("layout").dump());
    m.class_weights = {j.at("class_weights").at("preictal").get<double>(),
                       j.at("class_weights").at("interictal").get<double>()};
    m.train_segments = j.at("train_segments").get<std::size_t>();
    for (const auto& [role, file] : j.at("artifacts").items()) {
      m.artifacts.emplace_back(role, file.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::corrupt_artifact, (run_dir / kRunFile).string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::corrupt_artifact, (run_dir / kRunFile).string() + ": " + e.what());
  }
  return m;
}

void RunManifest::save() const { write_text(run_dir / kRunFile, to_json_text()); }

void RunManifest::set_artifact(const std::string& role, const std::string& file) {
  for (auto& [r, f] : artifacts) {
    if (r == role) {
      f = file;
      return;
    }
  }
  artifacts.emplace_back(role, file);
}

std::optional<std::string> RunManifest::artifact(const std::string& role) const {
  for (const auto& [r, f] : artifacts) {
    if (r == role) return f;
  }
  return std::nullopt;
}

namespace {

// ---- synth ----------------------------------------------------------------

struct SynthOptions {
  std::string out;
  SyntheticConfig config;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  const auto manifest = generate_synthetic(o.config, o.out);
  out << "wrote " << manifest.clips.size() << " clips for " << manifest.layouts.size()
      << " subject(s) to " << (fs::path(o.out) / "manifest.json").string() << "\n";
  return kOk;
}

// ---- preprocess -----------------------------------------------------------

struct PreprocessCmdOptions {
  std::string manifest;
  std::string out;
  bool naive = false;
};

int cmd_preprocess(const PreprocessCmdOptions& o, std::ostream& out) {
  const Manifest in = load_manifest(o.manifest);
  if (in.preprocessed) config_fail("manifest is already preprocessed");
  ensure_outside(o.out, in.base_dir);
  const fs::path dir = o.out;
  fs::create_directories(dir / "clips");
  Manifest result;
  result.base_dir = dir;
  result.preprocessed = true;
  for (const auto& subject : in.subjects()) {
    const fs::path layout_file = subject + "_layout.json";
    in.layout_for(subject).save(dir / layout_file);
    result.layouts[subject] = layout_file;
  }
  PreprocessOptions options;
  options.decimation = o.naive ? DecimationMode::naive : DecimationMode::filtered;
  std::size_t index = 0;
  for (const auto& record : in.clips) {
    const Clip clip = preprocess(load_record(in, record), options);
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "%05zu_", index++);
    const fs::path rel = fs::path("clips") / (prefix + record.path.filename().string());
    save_clip(clip, dir / rel);
    ClipRecord copy = record;
    copy.path = rel;
    result.clips.push_back(std::move(copy));
  }
  save_manifest(result, dir / "manifest.json");
  out << "preprocessed " << result.clips.size() << " clips into "
      << (dir / "manifest.json").string() << "\n";
  return kOk;
}

// ---- train ----------------------------------------------------------------

struct TrainOptions {
  std::string config;
  std::string manifest;
  std::string subject;
  std::string topology;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  std::string track_split;
};

struct TrainData {
  Manifest manifest;
  fs::path manifest_path;
  ElectrodeLayout layout = ElectrodeLayout::identity(false);
  SegmentBatch train;
  std::vector<PreparedClip> tracked;
};

void train_one(const TrainOptions& o, const TrainConfig& cfg, Topology topology,
               std::uint64_t seed, const TrainData& data, std::ostream& log) {
  TrainConfig run_cfg = cfg;
  run_cfg.seed = seed;
  run_cfg.topology = std::string(to_string(topology));
  const fs::path run_dir =
      fs::path(o.out) / (o.subject + "_" + run_cfg.topology + "_seed" + std::to_string(seed));
  fs::create_directories(run_dir);

  const RngStream root(seed);
  const ModelSpec spec = make_model_spec(topology, data.layout);
  const ParameterSet<float> initial = init_parameters(spec, root.split("init"));

  FitOptions options;
  options.log = &log;
  if (!data.tracked.empty()) {
    options.epoch_observer = [&](std::size_t, const ParameterSet<float>& params) {
      NetworkPredictor predictor(spec, params, data.layout);
      return std::optional<double>(score_clips(predictor, data.tracked).auc);
    };
  }
  const FitResult result =
      fit(spec, initial, data.layout, data.train, run_cfg, root.split("fit"), options);

  save_parameters(result.parameters, run_dir / kParametersFile);
  result.history.save(run_dir / kHistoryFile);
  RunManifest manifest;
  manifest.run_dir = run_dir;
  manifest.config = run_cfg;
  manifest.seed = seed;
  manifest.topology = run_cfg.topology;
  manifest.subject = o.subject;
  manifest.data_manifest = data.manifest_path;
  manifest.layout = data.layout;
  manifest.class_weights = result.weights;
  manifest.train_segments = data.train.size();
  manifest.toolkit_version = kVersion;
  manifest.rng_algorithm = std::string(RngStream::algorithm_id);
  manifest.set_artifact("parameters", kParametersFile);
  manifest.set_artifact("history", kHistoryFile);
  manifest.save();
  log << "run " << run_dir.string() << " final loss "
      << result.history.epochs.back().mean_loss << "\n";
}

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  const TrainConfig cfg = o.config.empty() ? TrainConfig{} : TrainConfig::load(o.config);
  cfg.validate();
  const Topology topology = topology_or_config(o.topology, cfg);
  std::vector<std::uint64_t> seeds;
  if (o.seed && !o.seeds.empty()) config_fail("--seed and --seeds are mutually exclusive");
  if (o.seed) seeds = {*o.seed};
  else if (!o.seeds.empty()) seeds = parse_seed_range(o.seeds);
  else seeds = {cfg.seed};
  const std::size_t workers = std::min(worker_count(), seeds.size());

  TrainData data;
  data.manifest_path = fs::weakly_canonical(fs::absolute(o.manifest));
  data.manifest = load_manifest(data.manifest_path);
  ensure_outside(o.out, data.manifest.base_dir);
  if (!data.manifest.has_subject(o.subject)) {
    throw Error(ErrorCode::unknown_subject, "unknown subject '" + o.subject + "'");
  }
  data.layout = data.manifest.layout_for(o.subject);
  make_model_spec(topology, data.layout);  // layout/topology compatibility, before any work
  data.train = stack_segments(prepare_clips(data.manifest, o.subject, Split::train));
  if (!o.track_split.empty()) {
    const Split split = split_flag(o.track_split);
    if (split == Split::train) config_fail("per-epoch AUC tracking needs a held-out split");
    data.tracked = prepare_clips(data.manifest, o.subject, split);
  }

  std::mutex io;
  std::atomic<std::size_t> next{0};
  int status = kOk;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      std::ostringstream log;
      int code = kOk;
      std::string message;
      try {
        train_one(o, cfg, topology, seeds[i], data, workers == 1 ? out : log);
      } catch (const Error& e) {
        code = e.code() == ErrorCode::config_error ? kConfigError : kDataError;
        message = e.what();
      } catch (const std::exception& e) {
        code = kFailure;
        message = e.what();
      }
      const std::lock_guard lock(io);
      out << log.str();
      if (code != kOk) {
        err << "error: seed " << seeds[i] << ": " << message << "\n";
        status = std::max(status, code);
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return status;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateOptions {
  std::string run;
  std::string manifest;
  std::string split = "test";
  std::string out;
};

struct LoadedRun {
  RunManifest manifest;
  ModelSpec spec;
  ParameterSet<float> params;
};

LoadedRun load_run(const fs::path& run_dir) {
  LoadedRun run;
  run.manifest = RunManifest::load(run_dir);
  const auto params_file = run.manifest.artifact("parameters");
  if (!params_file) throw Error(ErrorCode::corrupt_artifact, "run lists no parameters");
  run.params = load_parameters(run_dir / *params_file);
  run.spec = make_model_spec(parse_topology(run.manifest.topology), run.manifest.layout);
  // Fails with corrupt_artifact when names or shapes disagree with the spec.
  instantiate<float>(run.spec, run.params);
  return run;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const Split split = split_flag(o.split);
  LoadedRun run = load_run(o.run);
  const fs::path manifest_path = o.manifest.empty() ? run.manifest.data_manifest
                                                    : fs::path(o.manifest);
  const Manifest manifest = load_manifest(manifest_path);
  const fs::path dest = o.out.empty() ? fs::path(o.run) : fs::path(o.out);
  ensure_outside(dest, manifest.base_dir);
  fs::create_directories(dest);

  NetworkPredictor predictor(run.spec, run.params, run.manifest.layout);
  const EvaluationReport report =
      evaluate_subject(predictor, manifest, run.manifest.subject, split, run.manifest.seed);
  report.save(dest / kReportFile);
  write_text(dest / kRocFile, report.roc_csv());
  if (o.out.empty()) {
    run.manifest.set_artifact("report", kReportFile);
    run.manifest.set_artifact("roc", kRocFile);
    run.manifest.save();
  }
  out << report.subject << " " << report.topology << " auc " << format_auc(report.auc) << "\n";
  return kOk;
}

// ---- predict --------------------------------------------------------------

struct PredictOptions {
  std::string run;
  std::string clip;
};

int cmd_predict(const PredictOptions& o, std::ostream& out) {
  const LoadedRun run = load_run(o.run);
  Clip clip = load_clip(o.clip);
  if (clip.channels() != kClipChannels) {
    throw Error(ErrorCode::invalid_argument, "clip must have 16 channels");
  }
  // 400 Hz files are raw recordings; 200 Hz files come out of `preprocess`.
  if (clip.sample_rate_hz == kIngestRateHz) clip = preprocess(clip);
  else if (clip.sample_rate_hz != kModelRateHz) {
    throw Error(ErrorCode::invalid_argument, "clip must be sampled at 400 or 200 Hz");
  }
  const SegmentBatch batch = segment(clip, 0);
  if (batch.size() == 0) throw Error(ErrorCode::invalid_argument, "clip shorter than 15 s");
  NetworkPredictor predictor(run.spec, run.params, run.manifest.layout);
  const auto probs = predictor.predict(batch);
  out << std::setprecision(6) << std::fixed << aggregate_clip(probs) << "\n";
  return kOk;
}

// ---- split ----------------------------------------------------------------

struct SplitOptions {
  std::string manifest;
  std::string subject;
  double fraction = 0.2;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_split(const SplitOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.fraction > 0.0 && o.fraction < 1.0)) config_fail("--fraction must lie in (0, 1)");
  Manifest manifest = load_manifest(o.manifest);
  ensure_outside(o.out, manifest.base_dir);
  if (!o.subject.empty()) {
    if (!manifest.has_subject(o.subject)) {
      throw Error(ErrorCode::unknown_subject, "unknown subject '" + o.subject + "'");
    }
    std::erase_if(manifest.clips, [&](const ClipRecord& r) { return r.subject != o.subject; });
    std::erase_if(manifest.layouts, [&](const auto& kv) { return kv.first != o.subject; });
  }
  const ValidationSplit split = split_train_validation(manifest, o.fraction, o.seed);
  fs::create_directories(o.out);
  save_manifest(rebased(split.train, o.out), fs::path(o.out) / "train_manifest.json");
  save_manifest(rebased(split.validation, o.out), fs::path(o.out) / "validation_manifest.json");
  std::size_t val_pre = 0, val_inter = 0;
  for (const auto& c : split.validation.clips) {
    (c.label == Label::preictal ? val_pre : val_inter) += 1;
  }
  for (const auto& w : split.warnings) err << "warning: " << w << "\n";
  out << "validation: " << val_inter << " interictal, " << val_pre << " preictal\n";
  return kOk;
}

// ---- report ---------------------------------------------------------------

struct ReportOptions {
  std::string runs;
  std::string out;
};

int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(o.runs)) {
    throw Error(ErrorCode::io_error, "run directory " + o.runs + " does not exist");
  }
  std::vector<fs::path> candidates;
  for (const auto& entry : fs::recursive_directory_iterator(o.runs)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename();
    if (name == kRunFile) {
      candidates.push_back(entry.path().parent_path());
    } else if (name == kReportFile && !fs::exists(entry.path().parent_path() / kRunFile)) {
      candidates.push_back(entry.path().parent_path());
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::map<std::pair<std::string, std::string>, std::vector<EvaluationReport>> groups;
  std::vector<std::pair<std::string, std::string>> skipped;
  for (const auto& dir : candidates) {
    try {
      fs::path report_path = dir / kReportFile;
      if (fs::exists(dir / kRunFile)) {
        const auto run = RunManifest::load(dir);
        if (const auto file = run.artifact("report")) report_path = dir / *file;
      }
      if (!fs::exists(report_path)) {
        skipped.emplace_back(dir.generic_string(), "no evaluation report");
        continue;
      }
      EvaluationReport report = EvaluationReport::load(report_path);
      groups[{report.subject, report.topology}].push_back(std::move(report));
    } catch (const Error& e) {
      skipped.emplace_back(dir.generic_string(), e.what());
    }
  }
  for (const auto& [path, reason] : skipped) err << "skipped " << path << ": " << reason << "\n";
  if (groups.empty()) {
    throw Error(ErrorCode::io_error, "no completed evaluations under " + o.runs);
  }

  const fs::path dest = o.out;
  fs::create_directories(dest);
  ordered_json doc;
  doc["format"] = "ictal-aggregate";
  doc["version"] = 1;
  doc["quartile_method"] = std::string(kQuartileMethod);
  doc["groups"] = ordered_json::array();
  std::string box = "subject,topology,runs,min,q1,median,q3,max,mean\n";
  std::map<std::string, std::map<std::string, double>> table;
  for (const auto& [key, reports] : groups) {
    const RunAggregate agg = aggregate_runs(reports);
    ordered_json g;
    g["subject"] = agg.subject;
    g["topology"] = agg.topology;
    g["seeds"] = agg.seeds;
    g["aucs"] = agg.aucs;
    g["min"] = agg.stats.min;
    g["q1"] = agg.stats.q1;
    g["median"] = agg.stats.median;
    g["q3"] = agg.stats.q3;
    g["max"] = agg.stats.max;
    g["mean"] = agg.stats.mean;
    doc["groups"].push_back(std::move(g));
    box += agg.subject + "," + agg.topology + "," + std::to_string(agg.aucs.size());
    for (double v : {agg.stats.min, agg.stats.q1, agg.stats.median, agg.stats.q3, agg.stats.max,
                     agg.stats.mean}) {
      box += "," + format_double(v);
    }
    box += "\n";
    table[agg.subject][agg.topology] = agg.stats.mean;
  }
  ordered_json skipped_json = ordered_json::array();
  for (const auto& [path, reason] : skipped) {
    skipped_json.push_back({{"path", path}, {"reason", reason}});
  }
  doc["skipped"] = skipped_json;

  const std::vector<std::string> columns{"nv1x16", "nv4x4", "nv2x2x4"};
  std::string grid = "subject";
  for (const auto& c : columns) grid += "," + c;
  grid += "\n";
  out << std::left << std::setw(12) << "subject";
  for (const auto& c : columns) out << std::setw(10) << c;
  out << "\n";
  for (const auto& [subject, row] : table) {
    grid += subject;
    out << std::setw(12) << subject;
    for (const auto& c : columns) {
      const auto it = row.find(c);
      grid += ",";
      if (it != row.end()) grid += format_double(it->second);
      out << std::setw(10) << (it != row.end() ? format_auc(it->second) : std::string("-"));
    }
    grid += "\n";
    out << "\n";
  }
  write_text(dest / "aggregate.json", doc.dump(2) + "\n");
  write_text(dest / "table.csv", grid);
  write_text(dest / "box_stats.csv", box);
  out << "wrote " << groups.size() << " group(s) to " << dest.string() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seizure prediction from multichannel iEEG clips", "ictal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--subjects", synth.config.subjects, "Number of subjects");
  s->add_option("--train-per-class", synth.config.train_per_class, "Training clips per class");
  s->add_option("--test-per-class", synth.config.test_per_class, "Test clips per class");
  s->add_option("--minutes", synth.config.clip_minutes, "Clip length in minutes");
  s->add_option("--seed", synth.config.seed, "Generator seed");

  PreprocessCmdOptions prep;
  auto* p = app.add_subcommand("preprocess", "Decimate and normalize every clip of a manifest");
  p->add_option("--manifest", prep.manifest, "Input manifest")->required();
  p->add_option("--out", prep.out, "Output directory")->required();
  p->add_flag("--naive", prep.naive, "Drop every second sample without filtering");

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Train one subject/topology for one or more seeds");
  t->add_option("--config", train.config, "Training config (JSON)");
  t->add_option("--manifest", train.manifest, "Data manifest")->required();
  t->add_option("--subject", train.subject, "Subject id")->required();
  t->add_option("--topology", train.topology, "nv1x16, nv4x4 or nv2x2x4");
  t->add_option("--seed", train.seed, "Run seed");
  t->add_option("--seeds", train.seeds, "Inclusive seed range A..B");
  t->add_option("--out", train.out, "Directory for run directories")->required();
  t->add_option("--track-split", train.track_split,
                "Record per-epoch AUC on this split (reporting only)");

  EvaluateOptions eval;
  auto* e = app.add_subcommand("evaluate", "Score a trained run on a labeled split");
  e->add_option("--run", eval.run, "Run directory")->required();
  e->add_option("--manifest", eval.manifest, "Data manifest (default: the training manifest)");
  e->add_option("--split", eval.split, "train, test or validation");
  e->add_option("--out", eval.out, "Report directory (default: the run directory)");

  PredictOptions pred;
  auto* pr = app.add_subcommand("predict", "Preictal probability of one clip");
  pr->add_option("--run", pred.run, "Run directory")->required();
  pr->add_option("--clip", pred.clip, "Clip file")->required();

  SplitOptions split;
  auto* sp = app.add_subcommand("split", "Stratified train/validation split of a manifest");
  sp->add_option("--manifest", split.manifest, "Input manifest")->required();
  sp->add_option("--subject", split.subject, "Restrict to one subject");
  sp->add_option("--fraction", split.fraction, "Validation fraction per class");
  sp->add_option("--seed", split.seed, "Split seed");
  sp->add_option("--out", split.out, "Output directory")->required();

  ReportOptions report;
  auto* r = app.add_subcommand("report", "Aggregate evaluation reports across runs");
  r->add_option("--runs", report.runs, "Directory searched for runs")->required();
  r->add_option("--out", report.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& success) {
    return app.exit(success, out, err);
  } catch (const CLI::ParseError& failure) {
    app.exit(failure, out, err);
    return kConfigError;
  }

  try {
    if (*s) return cmd_synth(synth, out);
    if (*p) return cmd_preprocess(prep, out);
    if (*t) return cmd_train(train, out, err);
    if (*e) return cmd_evaluate(eval, out);
    if (*pr) return cmd_predict(pred, out);
    if (*sp) return cmd_split(split, out, err);
    if (*r) return cmd_report(report, out, err);
  } catch (const Error& failure) {
    err << "error: " << failure.what() << "\n";
    return failure.code() == ErrorCode::config_error ? kConfigError : kDataError;
  } catch (const std::exception& failure) {
    err << "error: " << failure.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace ictal::cli
