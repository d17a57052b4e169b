#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ictal/evaluation.hpp"
#include "ictal/synthetic.hpp"
#include "oracles.hpp"

namespace ictal {
namespace {

struct Instance {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

// Random two-class instance with tied scores injected.
Instance random_instance(std::mt19937_64& gen) {
  Instance in;
  const std::size_t n = 2 + gen() % 49;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    in.labels.push_back(static_cast<std::uint8_t>(gen() % 2));
    // coarse grid on some draws makes exact ties common
    const double s = u(gen);
    in.scores.push_back(gen() % 3 == 0 ? std::round(s * 4) / 4 : s);
  }
  in.labels[0] = 0;
  in.labels[1] = 1;
  if (gen() % 2) in.scores[1] = in.scores[0];
  return in;
}

TEST(AggregateClip, Examples) {
  EXPECT_EQ(aggregate_clip(std::vector<double>(40, 0.5)), 0.5);
  EXPECT_EQ(aggregate_clip(std::vector<double>{0.0, 1.0}), 0.5);
  EXPECT_DOUBLE_EQ(aggregate_clip(std::vector<double>{0.2, 0.4, 0.9, 0.5}), 0.5);
  EXPECT_THROW(aggregate_clip(std::vector<double>{}), Error);
}

TEST(AggregateClip, PermutationInvariant) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(40);
    for (auto& x : p) x = u(gen);
    const double base = aggregate_clip(p);
    std::shuffle(p.begin(), p.end(), gen);
    EXPECT_EQ(aggregate_clip(p), base);
  }
}

TEST(RocAuc, Examples) {
  const std::vector<std::uint8_t> labels{1, 1, 0, 0};
  EXPECT_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, labels), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, labels), 0.5);
  EXPECT_EQ(roc_auc(std::vector<double>{0.8, 0.4, 0.6, 0.2}, labels), 0.75);
}

TEST(RocAuc, MatchesPairCountingWithTies) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto in = random_instance(gen);
    EXPECT_NEAR(roc_auc(in.scores, in.labels), testing::pair_counting_auc(in.scores, in.labels),
                1e-10);
  }
}

TEST(RocAuc, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(gen);
    const double base = roc_auc(in.scores, in.labels);
    std::vector<double> affine, logistic;
    for (double s : in.scores) {
      affine.push_back(3.0 * s + 7.0);
      logistic.push_back(1.0 / (1.0 + std::exp(-(4.0 * s - 2.0))));
    }
    EXPECT_EQ(roc_auc(affine, in.labels), base);
    EXPECT_EQ(roc_auc(logistic, in.labels), base);
  }
}

TEST(RocAuc, LabelFlipSumsToOne) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 500; ++trial) {
    const auto in = random_instance(gen);
    auto flipped = in.labels;
    for (auto& l : flipped) l = 1 - l;
    EXPECT_EQ(roc_auc(in.scores, in.labels) + roc_auc(in.scores, flipped), 1.0);
  }
}

TEST(RocAuc, Errors) {
  const std::vector<double> s{0.1, 0.2};
  try {
    roc_auc(s, std::vector<std::uint8_t>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::single_class);
  }
  EXPECT_THROW(roc_auc(s, std::vector<std::uint8_t>{1}), Error);
  EXPECT_THROW(roc_auc(s, std::vector<std::uint8_t>{1, 2}), Error);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, NAN}, std::vector<std::uint8_t>{0, 1}), Error);
}

TEST(RocCurve, MonotoneFromOriginToCorner) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_instance(gen);
    const auto roc = roc_curve(in.scores, in.labels);
    ASSERT_GE(roc.size(), 2u);
    EXPECT_TRUE(std::isinf(roc.front().threshold));
    EXPECT_EQ(roc.front().fpr, 0.0);
    EXPECT_EQ(roc.front().tpr, 0.0);
    EXPECT_EQ(roc.back().fpr, 1.0);
    EXPECT_EQ(roc.back().tpr, 1.0);
    for (std::size_t i = 1; i < roc.size(); ++i) {
      EXPECT_LT(roc[i].threshold, roc[i - 1].threshold);
      EXPECT_GE(roc[i].fpr, roc[i - 1].fpr);
      EXPECT_GE(roc[i].tpr, roc[i - 1].tpr);
    }
    double area = 0;
    for (std::size_t i = 1; i < roc.size(); ++i) {
      area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2;
    }
    EXPECT_NEAR(area, roc_auc(in.scores, in.labels), 1e-12);
  }
}

TEST(BoxStats, Examples) {
  const auto one = box_stats(std::vector<double>{0.7});
  EXPECT_EQ(one, (BoxStats{0.7, 0.7, 0.7, 0.7, 0.7, 0.7}));
  std::vector<double> tenths;
  for (int i = 1; i <= 10; ++i) tenths.push_back(i / 10.0);
  const auto s = box_stats(tenths);
  EXPECT_NEAR(s.mean, 0.55, 1e-12);
  EXPECT_NEAR(s.median, 0.55, 1e-12);
  EXPECT_NEAR(s.q1, 0.325, 1e-12);
  EXPECT_NEAR(s.q3, 0.775, 1e-12);
  EXPECT_EQ(s.min, 0.1);
  EXPECT_EQ(s.max, 1.0);
  EXPECT_THROW(box_stats(std::vector<double>{}), Error);
}

EvaluationReport fake_report(const std::string& subject, std::uint64_t seed, double auc) {
  EvaluationReport r;
  r.subject = subject;
  r.topology = "nv1x16";
  r.seed = seed;
  r.auc = auc;
  return r;
}

TEST(AggregateRuns, PermutationInvariantAndConsistent) {
  std::vector<EvaluationReport> reports;
  for (std::uint64_t s = 1; s <= 10; ++s) reports.push_back(fake_report("s01", s, s / 10.0));
  const auto a = aggregate_runs(reports);
  std::mt19937_64 gen(3);
  std::shuffle(reports.begin(), reports.end(), gen);
  const auto b = aggregate_runs(reports);
  EXPECT_EQ(a.seeds, b.seeds);
  EXPECT_EQ(a.aucs, b.aucs);
  EXPECT_EQ(a.stats, b.stats);
  EXPECT_EQ(a.stats, box_stats(a.aucs));
  EXPECT_NEAR(a.stats.median, 0.55, 1e-12);
  EXPECT_EQ(a.seeds.front(), 1u);
}

TEST(AggregateRuns, Errors) {
  EXPECT_THROW(aggregate_runs(std::vector<EvaluationReport>{}), Error);
  const std::vector<EvaluationReport> mixed{fake_report("s01", 1, 0.5), fake_report("s02", 2, 0.6)};
  EXPECT_THROW(aggregate_runs(mixed), Error);
}

// Returns a fixed probability per segment regardless of input.
class ConstantPredictor : public SegmentPredictor {
 public:
  explicit ConstantPredictor(double p) : p_(p) {}
  std::vector<double> predict(const SegmentBatch& batch) override {
    return std::vector<double>(batch.size(), p_);
  }
  const ElectrodeLayout& layout() const override { return layout_; }
  std::string topology_name() const override { return "constant"; }

 private:
  double p_;
  ElectrodeLayout layout_ = ElectrodeLayout::identity(true);
};

// Emits 0.99 / 0.01 from the true segment labels.
class LabelPeekingPredictor : public SegmentPredictor {
 public:
  std::vector<double> predict(const SegmentBatch& batch) override {
    std::vector<double> out;
    for (auto l : batch.labels) out.push_back(l == 1 ? 0.99 : 0.01);
    return out;
  }
  const ElectrodeLayout& layout() const override { return layout_; }
  std::string topology_name() const override { return "oracle"; }

 private:
  ElectrodeLayout layout_ = ElectrodeLayout::identity(true);
};

struct SyntheticFixture : ::testing::Test {
  static void SetUpTestSuite() {
    dir = new testing::TempDir;
    SyntheticConfig cfg;
    cfg.train_per_class = 1;
    cfg.test_per_class = 3;
    cfg.clip_minutes = 0.5;
    cfg.seed = 11;
    manifest = new Manifest(generate_synthetic(cfg, dir->path()));
  }
  static void TearDownTestSuite() {
    delete manifest;
    delete dir;
  }
  static testing::TempDir* dir;
  static Manifest* manifest;
};
testing::TempDir* SyntheticFixture::dir = nullptr;
Manifest* SyntheticFixture::manifest = nullptr;

TEST_F(SyntheticFixture, ConstantModelScoresHalf) {
  ConstantPredictor model(0.5);
  const auto report = evaluate_subject(model, *manifest, "synth01", Split::test, 3);
  EXPECT_EQ(report.auc, 0.5);
  EXPECT_EQ(report.n_preictal, 3u);
  EXPECT_EQ(report.n_interictal, 3u);
  EXPECT_EQ(report.seed, 3u);
  EXPECT_EQ(report.subject, "synth01");
  ASSERT_EQ(report.clips.size(), 6u);
  for (const auto& c : report.clips) {
    EXPECT_EQ(c.segment_probabilities.size(), 2u);
    EXPECT_EQ(c.clip_probability, 0.5);
  }
}

TEST_F(SyntheticFixture, PerfectModelScoresOne) {
  LabelPeekingPredictor model;
  EXPECT_EQ(evaluate_subject(model, *manifest, "synth01", Split::test).auc, 1.0);
}

TEST_F(SyntheticFixture, ReportRoundTripKeepsAuc) {
  LabelPeekingPredictor model;
  auto report = evaluate_subject(model, *manifest, "synth01", Split::test, 9);
  report.clips[0].segment_probabilities = {0.123456789012345678, 0.3};
  report.clips[0].clip_probability = aggregate_clip(report.clips[0].segment_probabilities);
  report.auc = report.recompute_auc();
  report.roc = {};
  const auto path = *dir / "report.json";
  report.save(path);
  const auto back = EvaluationReport::load(path);
  EXPECT_EQ(back.clips, report.clips);
  EXPECT_EQ(back.recompute_auc(), back.auc);
  EXPECT_EQ(back.auc, report.auc);
  EXPECT_EQ(back.to_json_text(), report.to_json_text());
}

TEST_F(SyntheticFixture, RocCsvHasHeaderAndPoints) {
  LabelPeekingPredictor model;
  const auto report = evaluate_subject(model, *manifest, "synth01", Split::test);
  const auto csv = report.roc_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "threshold,fpr,tpr");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')),
            report.roc.size() + 1);
}

TEST_F(SyntheticFixture, LayoutMismatchAndUnknownSubject) {
  struct OtherLayout : ConstantPredictor {
    OtherLayout() : ConstantPredictor(0.5) {}
    const ElectrodeLayout& layout() const override { return other; }
    ElectrodeLayout other = ElectrodeLayout::identity(false);
  } model;
  try {
    evaluate_subject(model, *manifest, "synth01", Split::test);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::layout_mismatch);
  }
  ConstantPredictor ok(0.5);
  EXPECT_THROW(evaluate_subject(ok, *manifest, "synth07", Split::test), Error);
}

TEST_F(SyntheticFixture, BandpowerOracleSeparatesTestClips) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (const auto& rec : manifest->select("synth01", Split::test)) {
    scores.push_back(testing::band_power_fraction(load_record(*manifest, rec), 18, 24));
    labels.push_back(static_cast<std::uint8_t>(rec.label));
  }
  EXPECT_GE(roc_auc(scores, labels), 0.95);
}

TEST_F(SyntheticFixture, NetworkPredictorGivesProbabilities) {
  const auto layout = manifest->layout_for("synth01");
  for (auto t : {Topology::nv1x16, Topology::nv2x2x4}) {
    auto [spec, params] = build_topology(t, layout, RngStream(2));
    NetworkPredictor model(spec, params, layout, 5);
    EXPECT_EQ(model.topology_name(), to_string(t));
    const auto a = evaluate_subject(model, *manifest, "synth01", Split::test);
    const auto b = evaluate_subject(model, *manifest, "synth01", Split::test);
    EXPECT_EQ(a.to_json_text(), b.to_json_text());
    for (const auto& c : a.clips) {
      for (double p : c.segment_probabilities) {
        EXPECT_GT(p, 0.0);
        EXPECT_LT(p, 1.0);
      }
    }
  }
}

}  // namespace
}  // namespace ictal
