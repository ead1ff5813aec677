// Copyright 2026 The gridseld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "gridseld/config.h"
#include "gridseld/errors.h"
#include "gridseld/formats.h"
#include "gridseld/simulator.h"

namespace gridseld {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = GRIDSELD_FIXTURE_DIR;

struct CliRun {
  int status;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gridseld");
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gridseld_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& body) const {
    std::ofstream(dir_ / name) << body;
  }
  fs::path dir_;
};

TEST(Config, Defaults) {
  const Config c;
  EXPECT_EQ(c.grid, GridSpec(45, 45, 0.5));
  EXPECT_EQ(c.slots, 3);
  EXPECT_EQ(c.thresholds, (std::vector<double>{45, 25, 10}));
  EXPECT_EQ(c.weights.w_delta, 5);
  EXPECT_EQ(c.weights.w_pos, 1);
  EXPECT_EQ(c.weights.w_neg, 5);
  EXPECT_EQ(c.weights.w_class, 3);
  EXPECT_EQ(c.score_threshold, 0.5);
  EXPECT_EQ(c.upsilon_deg, 15);
  EXPECT_EQ(c.labels_per_second, 10);
}

TEST(Config, ParsesKeyValueFile) {
  std::istringstream in(
      "# grid\n"
      "cell_width = 30\n"
      "cell_height=30\n"
      "overlap = 0.25\n"
      "\n"
      "slots=2\nnum_classes=13\nthresholds=60, 20\n"
      "w_delta=4\nw_pos=2\nw_neg=1\nw_class=0.5\n"
      "upsilon=30\nscore_threshold=0.6\nlabels_per_second=50\nseed=99\n");
  const Config c = parse_config(in);
  EXPECT_EQ(c.grid, GridSpec(30, 30, 0.25));
  EXPECT_EQ(c.slots, 2);
  EXPECT_EQ(c.num_classes, 13);
  EXPECT_EQ(c.thresholds, (std::vector<double>{60, 20}));
  EXPECT_EQ(c.weights.w_delta, 4);
  EXPECT_EQ(c.weights.w_class, 0.5);
  EXPECT_EQ(c.upsilon_deg, 30);
  EXPECT_EQ(c.score_threshold, 0.6);
  EXPECT_EQ(c.labels_per_second, 50);
  EXPECT_EQ(c.seed, 99u);

  std::ostringstream out;
  write_config(out, c);
  std::istringstream back(out.str());
  const Config d = parse_config(back);
  EXPECT_EQ(d.grid, c.grid);
  EXPECT_EQ(d.thresholds, c.thresholds);
  EXPECT_EQ(d.seed, c.seed);
  EXPECT_EQ(d.weights.w_neg, c.weights.w_neg);
}

TEST(Config, ErrorsReportLine) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_config(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 1000;  // accepted
  };
  EXPECT_EQ(line_of("slots=3\nbogus=1\n"), 2u);
  EXPECT_EQ(line_of("# c\n\nslots=three\n"), 3u);
  EXPECT_EQ(line_of("slots 3\n"), 1u);
  EXPECT_EQ(line_of("thresholds=10,,5\n"), 1u);
  // Whole-file validation errors are not tied to a line.
  EXPECT_EQ(line_of("cell_width=50\n"), 0u);
  EXPECT_EQ(line_of("slots=0\n"), 0u);
  EXPECT_EQ(line_of("slots=4\n"), 1000u);
}

TEST(EventCsv, ReadsBothHeadersAndReportsLines) {
  std::istringstream refs("frame,class_id,source_id,azimuth_deg,elevation_deg\n0,1,2,10.5,-3\n");
  const auto rows = read_event_csv(refs);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].source_id, 2);
  EXPECT_EQ(rows[0].line, 2u);
  EXPECT_FALSE(rows[0].score.has_value());

  std::istringstream dets("frame,class_id,source_id,azimuth_deg,elevation_deg,score\n\n3,0,-1,1,2,0.75\n");
  const auto drows = read_event_csv(dets);
  ASSERT_EQ(drows.size(), 1u);
  EXPECT_EQ(drows[0].line, 3u);
  EXPECT_EQ(*drows[0].score, 0.75);

  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_event_csv(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string h = "frame,class_id,source_id,azimuth_deg,elevation_deg\n";
  EXPECT_EQ(line_of(h + "0,0,0,1,2\n0,0,0,x,2\n"), 3u);
  EXPECT_EQ(line_of(h + "0,0,0,1\n"), 2u);
  EXPECT_EQ(line_of(h + "0,0,0,1,2,3\n"), 2u);
  EXPECT_EQ(line_of(h + "0,0,0,1,95\n"), 2u);
  EXPECT_EQ(line_of(h + "-1,0,0,1,5\n"), 2u);
  EXPECT_EQ(line_of("frame,class\n0,0\n"), 1u);
  EXPECT_EQ(line_of(""), 0u);
  EXPECT_THROW(read_event_csv_file("/nonexistent/refs.csv"), ParseError);
}

TEST(EventCsv, SimulatedSceneRoundTripsExactly) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SceneSpec s;
    s.seed = seed;
    s.trajectory = seed % 2 ? TrajectoryKind::kDrift : TrajectoryKind::kStatic;
    s.same_class_overlap_prob = 0.5;
    const Scene sc = simulate(s);
    std::stringstream csv;
    write_reference_csv(csv, sc.refs, sc.source_ids);
    const auto rows = read_event_csv(csv);
    const ReferenceSet back =
        events_to_reference_set(to_event_rows(rows), s.num_frames, s.num_classes, s.grid);
    EXPECT_EQ(back, sc.refs) << seed;
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].source_id, sc.source_ids[i]);
  }
}

TEST(EventCsv, DetectionsRoundTrip) {
  const std::vector<Detection> dets = {{0, 1, Direction::from_degrees(12.25, -7.5), 0.875},
                                       {4, 0, Direction::from_degrees(-179.9, 89.1), 0.51}};
  std::stringstream csv;
  write_detection_csv(csv, dets);
  const auto back = to_detections(read_event_csv(csv));
  ASSERT_EQ(back.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].frame, dets[i].frame);
    EXPECT_EQ(back[i].class_id, dets[i].class_id);
    EXPECT_EQ(back[i].doa, dets[i].doa);
    EXPECT_EQ(back[i].score, dets[i].score);
  }
}

TEST(TensorFormat, RoundTripAndHeader) {
  const TensorShape s{2, 32, 3, 4};
  std::vector<double> raw(s.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<float>(0.01 * i - 3);
  const PredictionTensor p(s, raw);
  std::stringstream bin;
  write_tensor(bin, p);
  const std::string bytes = bin.str();
  ASSERT_EQ(bytes.size(), 5 * 4 + s.size() * 4);
  // Little-endian magic and header.
  EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 0x47);
  EXPECT_EQ(static_cast<unsigned char>(bytes[3]), 0x54);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 32);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 7);
  std::stringstream in(bytes);
  const PredictionTensor q = read_tensor(in, {32, 3, 4});
  EXPECT_EQ(q.shape(), s);
  for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_EQ(q[i], raw[i]);
}

TEST(TensorFormat, RejectsBadInput) {
  const TensorShape s{1, 32, 3, 4};
  std::stringstream bin;
  write_tensor(bin, PredictionTensor(s));
  const std::string good = bin.str();
  auto fails = [](const std::string& bytes, TensorExpectation e = {}) {
    std::stringstream in(bytes);
    try {
      read_tensor(in, e);
    } catch (const ParseError&) {
      return true;
    } catch (const ConfigError&) {
      return true;
    }
    return false;
  };
  EXPECT_FALSE(fails(good));
  EXPECT_TRUE(fails(good, {32, 2, 4}));
  EXPECT_TRUE(fails(good, {18, 3, 4}));
  EXPECT_TRUE(fails(good, {32, 3, 5}));
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_TRUE(fails(bad_magic));
  EXPECT_TRUE(fails(good.substr(0, good.size() - 2)));
  EXPECT_TRUE(fails(good.substr(0, 10)));
  EXPECT_TRUE(fails(good + "junk"));
  std::string nan = good;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + 20, &q, 4);
  EXPECT_TRUE(fails(nan));
}

TEST(FeatureFormat, RoundTrip) {
  const Eigen::MatrixXd f = Eigen::MatrixXd::Random(5, 12).cast<float>().cast<double>();
  std::stringstream bin;
  write_features(bin, f);
  EXPECT_TRUE(read_features(bin) == f);
}

TEST(MetricsFormats, TextAndJsonFieldNames) {
  MetricsReport r;
  r.er20 = 0.25;
  r.f20 = 0.5;
  r.lr_cd = 0.75;
  r.seld_error = 0.4;
  std::ostringstream text;
  write_metrics_text(text, r);
  EXPECT_NE(text.str().find("le_cd_deg=undefined\n"), std::string::npos);
  EXPECT_NE(text.str().find("er20=0.25\n"), std::string::npos);
  const std::string json = metrics_json(r);
  for (const char* key : {"\"er20\"", "\"f20\"", "\"le_cd_deg\": null", "\"lr_cd\"", "\"seld_error\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
}

TEST_F(TempDir, EvalOnIdenticalFilesIsPerfect) {
  const auto refs = (kFixtures / "three_segment_refs.csv").string();
  const CliRun r = run_cli({"eval", "--refs", refs, "--dets", refs});
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* line : {"er20=0\n", "f20=1\n", "le_cd_deg=0\n", "lr_cd=1\n", "seld_error=0\n"}) {
    EXPECT_NE(r.out.find(line), std::string::npos) << line << r.out;
  }
}

TEST_F(TempDir, EvalMatchesGoldenFile) {
  const CliRun r = run_cli({"eval", "--refs", (kFixtures / "three_segment_refs.csv").string(),
                            "--dets", (kFixtures / "three_segment_dets.csv").string(), "--json",
                            path("m.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, slurp(kFixtures / "three_segment_golden.txt"));
  const std::string json = slurp(path("m.json"));
  EXPECT_NE(json.find("\"seld_error\""), std::string::npos);
}

TEST_F(TempDir, EvalOverlapOnly) {
  const CliRun r = run_cli({"eval", "--overlap-only", "--refs",
                            (kFixtures / "three_segment_refs.csv").string(), "--dets",
                            (kFixtures / "three_segment_dets.csv").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("references=4\n"), std::string::npos) << r.out;
}

TEST_F(TempDir, MalformedCsvGivesLineDiagnostic) {
  write("bad.csv", "frame,class_id,source_id,azimuth_deg,elevation_deg\n0,0,0,1,2\n1,0,0,abc,2\n");
  const CliRun r = run_cli({"eval", "--refs", path("bad.csv"), "--dets", path("bad.csv")});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  write("cls.csv", "frame,class_id,source_id,azimuth_deg,elevation_deg\n0,9,0,1,2\n");
  const CliRun c = run_cli({"eval", "--refs", path("cls.csv"), "--dets", path("cls.csv")});
  EXPECT_NE(c.status, 0);
  EXPECT_NE(c.err.find("line 2"), std::string::npos) << c.err;
}

TEST_F(TempDir, UnknownFlagsAndMissingFiles) {
  EXPECT_NE(run_cli({"eval", "--bogus"}).status, 0);
  EXPECT_NE(run_cli({}).status, 0);
  const CliRun r = run_cli({"loss", "--refs", path("none.csv"), "--preds", path("none.bin")});
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(TempDir, SimulateIsDeterministicAndRoundTrips) {
  const CliRun a = run_cli({"--seed", "5", "simulate", "--out", path("a.csv"), "--features",
                            path("a.bin"), "--overlap-prob", "0.5", "--trajectory", "drift"});
  const CliRun b = run_cli({"--seed", "5", "simulate", "--out", path("b.csv"), "--features",
                            path("b.bin"), "--overlap-prob", "0.5", "--trajectory", "drift"});
  ASSERT_EQ(a.status, 0) << a.err;
  ASSERT_EQ(b.status, 0) << b.err;
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.bin")), slurp(path("b.bin")));

  SceneSpec s;
  s.seed = 5;
  s.same_class_overlap_prob = 0.5;
  s.trajectory = TrajectoryKind::kDrift;
  const Scene sc = simulate(s);
  const ReferenceSet back = events_to_reference_set(to_event_rows(read_event_csv_file(path("a.csv"))),
                                                    100, 5, GridSpec());
  EXPECT_EQ(back, sc.refs);
  const Eigen::MatrixXd f = read_features_file(path("a.bin"));
  EXPECT_LT((f - sc.features).cwiseAbs().maxCoeff(), 1e-6);
}

TEST_F(TempDir, TrainDecodeEncodeLossPipeline) {
  const CliRun t = run_cli({"--seed", "2", "train-toy", "--frames", "30", "--epochs", "150",
                            "--hidden", "32", "--out", path("p.bin"), "--refs-out", path("r.csv"),
                            "--curve", path("curve.csv")});
  ASSERT_EQ(t.status, 0) << t.err;
  const std::string curve = slurp(path("curve.csv"));
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "epoch,l_delta,l_pos,l_neg,l_class,total");
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 152);

  const CliRun e = run_cli({"encode", "--refs", path("r.csv"), "--preds", path("p.bin")});
  ASSERT_EQ(e.status, 0) << e.err;
  EXPECT_NE(e.out.find("tau=45"), std::string::npos);
  EXPECT_NE(e.out.find("tau=10"), std::string::npos);
  ASSERT_EQ(run_cli({"encode", "--refs", path("r.csv"), "--preds", path("p.bin"), "--out",
                     path("masks.txt")}).status, 0);
  EXPECT_EQ(slurp(path("masks.txt")), e.out);

  const CliRun l = run_cli({"loss", "--refs", path("r.csv"), "--preds", path("p.bin")});
  ASSERT_EQ(l.status, 0) << l.err;
  EXPECT_NE(l.out.find("total="), std::string::npos);

  const CliRun d = run_cli({"decode", "--preds", path("p.bin"), "--upsilon", "15", "--out", path("d.csv")});
  ASSERT_EQ(d.status, 0) << d.err;
  const CliRun v = run_cli({"eval", "--refs", path("r.csv"), "--dets", path("d.csv")});
  ASSERT_EQ(v.status, 0) << v.err;
  EXPECT_NE(v.out.find("f20="), std::string::npos);

  // Wrong class count for the tensor is rejected.
  EXPECT_NE(run_cli({"--classes", "4", "loss", "--refs", path("r.csv"), "--preds", path("p.bin")}).status, 0);
}

TEST_F(TempDir, ConfigFileIsOverriddenByFlags) {
  write("cfg.txt", "num_classes=3\nseed=11\n");
  const CliRun a = run_cli({"--config", path("cfg.txt"), "simulate", "--out", path("a.csv")});
  const CliRun b = run_cli({"--config", path("cfg.txt"), "--seed", "11", "--classes", "3",
                            "simulate", "--out", path("b.csv")});
  const CliRun c = run_cli({"--config", path("cfg.txt"), "--seed", "12", "simulate", "--out",
                            path("c.csv")});
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
  write("bad.txt", "seed=1\nslots=-2\n");
  EXPECT_NE(run_cli({"--config", path("bad.txt"), "simulate", "--out", path("x.csv")}).status, 0);
}

TEST(CliGradcheck, PassesForSeedSeven) {
  const CliRun r = run_cli({"--seed", "7", "gradcheck", "--instances", "5"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("max_rel_error="), std::string::npos);
}

}  // namespace
}  // namespace gridseld
