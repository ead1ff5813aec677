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

#include "cli.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "gradcheck.h"
#include "gridseld/config.h"
#include "gridseld/decoder.h"
#include "gridseld/demo.h"
#include "gridseld/errors.h"
#include "gridseld/formats.h"
#include "gridseld/metrics.h"

namespace gridseld::cli {

namespace {

struct Overrides {
  std::string config_path;
  double cell_width = 0, cell_height = 0, overlap = 0;
  int slots = 0, classes = 0;
  std::vector<double> thresholds;
  double upsilon = 0, score_threshold = 0, labels_per_second = 0;
  std::uint64_t seed = 0;
};

struct SceneFlags {
  int frames = 100;
  int polyphony = 3;
  double overlap_prob = 0.0;
  std::string trajectory = "static";
  double velocity = 1.0;
  double birth_prob = 0.3;
  double death_prob = 0.05;
  double noise = 0.0;
};

struct TrainFlags {
  int epochs = 2000;
  double lr = 1.0;
  int hidden = 64;
  bool no_backtracking = false;
  std::string curve_path;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  Config config() const;
  SceneSpec scene_spec(const Config& c) const;
  TrainOptions train_options(const Config& c) const;
  MetricsConfig metrics_config(const Config& c, bool overlap_only) const;
  ReferenceSet load_refs(const std::string& path, int frames, const Config& c) const;

  int simulate();
  int encode();
  int loss();
  int gradcheck();
  int decode();
  int eval();
  int train_toy();
  int demo();

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Spherical-grid sound event localization and detection toolkit", "gridseld"};
  Overrides ov_;
  SceneFlags scene_;
  TrainFlags train_;
  std::string refs_path_, preds_path_, dets_path_, out_path_, features_path_, json_path_;
  bool overlap_only_ = false;
  int instances_ = 20;
};

Config Cli::config() const {
  Config c;
  if (!ov_.config_path.empty()) c = load_config(ov_.config_path);
  auto given = [&](const char* name) { return app_.get_option(name)->count() > 0; };
  const double w = given("--cell-width") ? ov_.cell_width : c.grid.cell_width();
  const double h = given("--cell-height") ? ov_.cell_height : c.grid.cell_height();
  const double o = given("--overlap") ? ov_.overlap : c.grid.overlap_fraction();
  c.grid = GridSpec(w, h, o);
  if (given("--slots")) c.slots = ov_.slots;
  if (given("--classes")) c.num_classes = ov_.classes;
  if (given("--thresholds")) c.thresholds = ov_.thresholds;
  if (given("--upsilon")) c.upsilon_deg = ov_.upsilon;
  if (given("--score-threshold")) c.score_threshold = ov_.score_threshold;
  if (given("--labels-per-second")) c.labels_per_second = ov_.labels_per_second;
  if (given("--seed")) c.seed = ov_.seed;
  c.validate();
  return c;
}

SceneSpec Cli::scene_spec(const Config& c) const {
  SceneSpec s;
  s.num_frames = scene_.frames;
  s.num_classes = c.num_classes;
  s.max_polyphony = scene_.polyphony;
  s.same_class_overlap_prob = scene_.overlap_prob;
  if (scene_.trajectory == "static") {
    s.trajectory = TrajectoryKind::kStatic;
  } else if (scene_.trajectory == "drift") {
    s.trajectory = TrajectoryKind::kDrift;
  } else {
    throw ConfigError("trajectory must be 'static' or 'drift'");
  }
  s.angular_velocity_deg = scene_.velocity;
  s.birth_prob = scene_.birth_prob;
  s.death_prob = scene_.death_prob;
  s.noise_amplitude = scene_.noise;
  s.seed = c.seed;
  s.grid = c.grid;
  s.validate();
  return s;
}

TrainOptions Cli::train_options(const Config& c) const {
  TrainOptions t;
  t.epochs = train_.epochs;
  t.learning_rate = train_.lr;
  t.backtracking = !train_.no_backtracking;
  t.weights = c.weights;
  t.thresholds = c.thresholds;
  return t;
}

MetricsConfig Cli::metrics_config(const Config& c, bool overlap_only) const {
  MetricsConfig m;
  m.labels_per_second = c.labels_per_second;
  m.overlap_only = overlap_only;
  return m;
}

ReferenceSet Cli::load_refs(const std::string& path, int frames, const Config& c) const {
  const std::vector<EventCsvRow> rows = read_event_csv_file(path);
  try {
    return events_to_reference_set(to_event_rows(rows), frames, c.num_classes, c.grid);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

int Cli::simulate() {
  const Config c = config();
  const Scene scene = gridseld::simulate(scene_spec(c));
  std::ofstream csv(out_path_);
  if (!csv) throw ParseError(0, "cannot open '" + out_path_ + "' for writing");
  write_reference_csv(csv, scene.refs, scene.source_ids);
  if (!features_path_.empty()) write_features_file(features_path_, scene.features);
  out_ << "frames=" << scene.refs.num_frames << '\n'
       << "events=" << scene.refs.events.size() << '\n'
       << "feature_width=" << scene.features.cols() << '\n';
  return 0;
}

int Cli::encode() {
  const Config c = config();
  const PredictionTensor preds =
      read_tensor_file(preds_path_, {c.grid.cell_count(), c.slots, c.num_classes});
  const ReferenceSet refs = load_refs(refs_path_, preds.shape().frames, c);
  const ResponsibilityMasks masks = assign_responsibility(refs, preds, c.thresholds);

  std::ostringstream summary;
  summary << "references=" << refs.events.size() << '\n'
          << "slots=" << preds.shape().slot_count() << '\n';
  for (const ThresholdMasks& level : masks.levels) {
    const std::size_t covered = static_cast<std::size_t>(std::count_if(
        level.per_reference.begin(), level.per_reference.end(),
        [](const auto& slots) { return !slots.empty(); }));
    const std::size_t class_marks = static_cast<std::size_t>(
        std::count(level.classes.begin(), level.classes.end(), 1));
    summary << "tau=" << level.tau_deg << " responsible_slots=" << level.responsible_count()
            << " pairs=" << level.pair_count() << " covered_references=" << covered
            << " class_targets=" << class_marks << '\n';
  }
  if (out_path_.empty()) {
    out_ << summary.str();
  } else {
    std::ofstream file(out_path_);
    if (!file) throw ParseError(0, "cannot open '" + out_path_ + "' for writing");
    file << summary.str();
  }
  return 0;
}

int Cli::loss() {
  const Config c = config();
  const PredictionTensor preds =
      read_tensor_file(preds_path_, {c.grid.cell_count(), c.slots, c.num_classes});
  const ReferenceSet refs = load_refs(refs_path_, preds.shape().frames, c);
  write_loss_breakdown(out_, total_loss(refs, preds, c.weights, c.thresholds).breakdown);
  return 0;
}

int Cli::gradcheck() {
  const Config c = config();
  check::InstanceOptions options;
  options.grid = c.grid;
  options.slots = c.slots;
  const check::SuiteReport suite =
      check::run_gradient_suite(c.seed, instances_, c.weights, c.thresholds, options);
  out_ << std::setprecision(6);
  for (int t = 0; t < 5; ++t) {
    const check::GradientReport& r = suite.per_term[t];
    out_ << check::term_name(static_cast<check::Term>(t)) << " max_rel_error=" << r.max_relative_error
         << " checked=" << r.checked << " skipped=" << r.skipped << '\n';
  }
  const double worst = suite.max_relative_error();
  out_ << "instances=" << suite.instances << '\n' << "max_rel_error=" << worst << '\n';
  if (worst >= 1e-4) {
    err_ << "gradcheck: max relative error " << worst << " exceeds 1e-4\n";
    return 1;
  }
  return 0;
}

int Cli::decode() {
  const Config c = config();
  const PredictionTensor preds =
      read_tensor_file(preds_path_, {c.grid.cell_count(), c.slots, c.num_classes});
  const std::vector<Detection> dets =
      gridseld::decode(preds, c.grid, c.upsilon_deg, c.score_threshold);
  std::ofstream csv(out_path_);
  if (!csv) throw ParseError(0, "cannot open '" + out_path_ + "' for writing");
  write_detection_csv(csv, dets);
  out_ << "detections=" << dets.size() << '\n';
  return 0;
}

int Cli::eval() {
  const Config c = config();
  const std::vector<EventCsvRow> ref_rows = read_event_csv_file(refs_path_);
  const std::vector<EventCsvRow> det_rows = read_event_csv_file(dets_path_);
  int frames = 0;
  for (const auto& r : ref_rows) frames = std::max(frames, r.frame + 1);
  for (const auto& r : det_rows) frames = std::max(frames, r.frame + 1);

  ReferenceSet refs;
  try {
    refs = events_to_reference_set(to_event_rows(ref_rows), frames, c.num_classes, c.grid);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), refs_path_ + ": " + e.detail());
  }
  std::vector<Detection> dets;
  try {
    for (const auto& r : det_rows) {
      if (r.class_id >= c.num_classes) {
        throw ParseError(r.line, "class " + std::to_string(r.class_id) + " outside [0, " +
                                     std::to_string(c.num_classes) + ")");
      }
    }
    dets = to_detections(det_rows);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), dets_path_ + ": " + e.detail());
  }

  const MetricsReport report = evaluate(dets, refs.events, metrics_config(c, overlap_only_));
  write_metrics_text(out_, report);
  if (!json_path_.empty()) {
    std::ofstream json(json_path_);
    if (!json) throw ParseError(0, "cannot open '" + json_path_ + "' for writing");
    json << metrics_json(report) << '\n';
  }
  return 0;
}

int Cli::train_toy() {
  const Config c = config();
  const Scene scene = gridseld::simulate(scene_spec(c));
  TensorShape frame_shape{1, c.grid.cell_count(), c.slots, c.num_classes};
  ToyHead head(feature_dimension(c.num_classes), train_.hidden, frame_shape, c.seed + 1);
  const TrainResult result = gridseld::train_toy(std::span<const Scene>(&scene, 1),
                                                 std::move(head), train_options(c));
  if (!train_.curve_path.empty()) {
    std::ofstream curve(train_.curve_path);
    if (!curve) throw ParseError(0, "cannot open '" + train_.curve_path + "' for writing");
    write_loss_curve_csv(curve, result.curve);
  }
  if (!out_path_.empty()) write_tensor_file(out_path_, result.head.forward(scene.features));
  if (!refs_path_.empty()) {
    std::ofstream csv(refs_path_);
    if (!csv) throw ParseError(0, "cannot open '" + refs_path_ + "' for writing");
    write_reference_csv(csv, scene.refs, scene.source_ids);
  }
  out_ << std::setprecision(8) << "initial_loss=" << result.curve.front().total << '\n'
       << "final_loss=" << result.curve.back().total << '\n'
       << "epochs=" << train_.epochs << '\n';
  return 0;
}

int Cli::demo() {
  const Config c = config();
  DemoOptions d;
  d.scene = scene_spec(c);
  d.slots = c.slots;
  d.hidden_dim = train_.hidden;
  d.training = train_options(c);
  d.upsilon_deg = c.upsilon_deg;
  d.score_threshold = c.score_threshold;
  d.metrics = metrics_config(c, false);
  const DemoResult r = run_demo(d);
  if (!train_.curve_path.empty()) {
    std::ofstream curve(train_.curve_path);
    if (!curve) throw ParseError(0, "cannot open '" + train_.curve_path + "' for writing");
    write_loss_curve_csv(curve, r.training.curve);
  }
  out_ << std::setprecision(8) << "references=" << r.scene.refs.events.size() << '\n'
       << "detections=" << r.detections.size() << '\n'
       << "initial_loss=" << r.training.curve.front().total << '\n'
       << "final_loss=" << r.training.curve.back().total << '\n';
  write_metrics_text(out_, r.report);
  return 0;
}

int Cli::run(const std::vector<std::string>& args) {
  app_.require_subcommand(1);
  app_.fallthrough();
  app_.add_option("--config", ov_.config_path, "key=value configuration file");
  app_.add_option("--cell-width", ov_.cell_width, "grid cell width in degrees");
  app_.add_option("--cell-height", ov_.cell_height, "grid cell height in degrees");
  app_.add_option("--overlap", ov_.overlap, "grid overlap fraction in [0, 1)");
  app_.add_option("--slots", ov_.slots, "predictions per cell (K)");
  app_.add_option("--classes", ov_.classes, "number of classes (C)");
  app_.add_option("--thresholds", ov_.thresholds, "responsibility thresholds in degrees")
      ->delimiter(',');
  app_.add_option("--upsilon", ov_.upsilon, "unification threshold in degrees");
  app_.add_option("--score-threshold", ov_.score_threshold, "detection score threshold");
  app_.add_option("--labels-per-second", ov_.labels_per_second, "label frames per second");
  app_.add_option("--seed", ov_.seed, "random seed");

  auto add_scene = [&](CLI::App* sub) {
    sub->add_option("--frames", scene_.frames, "scene length in frames");
    sub->add_option("--polyphony", scene_.polyphony, "maximum simultaneous events");
    sub->add_option("--overlap-prob", scene_.overlap_prob,
                    "probability that a newborn event repeats an active class");
    sub->add_option("--trajectory", scene_.trajectory, "static or drift");
    sub->add_option("--velocity", scene_.velocity, "drift speed in degrees per frame");
    sub->add_option("--birth-prob", scene_.birth_prob, "per-frame birth probability");
    sub->add_option("--death-prob", scene_.death_prob, "per-frame death probability");
    sub->add_option("--noise", scene_.noise, "feature noise amplitude");
  };
  auto add_train = [&](CLI::App* sub) {
    sub->add_option("--epochs", train_.epochs, "training epochs");
    sub->add_option("--lr", train_.lr, "initial learning rate");
    sub->add_option("--hidden", train_.hidden, "toy head hidden width");
    sub->add_flag("--no-backtracking", train_.no_backtracking, "use a fixed step");
    sub->add_option("--curve", train_.curve_path, "loss curve CSV output");
  };

  CLI::App* sim = app_.add_subcommand("simulate", "write a synthetic scene");
  sim->add_option("--out", out_path_, "reference CSV output")->required();
  sim->add_option("--features", features_path_, "binary feature output");
  add_scene(sim);

  CLI::App* enc = app_.add_subcommand("encode", "summarize responsibility masks");
  enc->add_option("--refs", refs_path_, "reference CSV")->required();
  enc->add_option("--preds", preds_path_, "binary prediction tensor")->required();
  enc->add_option("--out", out_path_, "summary output (stdout when omitted)");

  CLI::App* los = app_.add_subcommand("loss", "print the loss breakdown");
  los->add_option("--refs", refs_path_, "reference CSV")->required();
  los->add_option("--preds", preds_path_, "binary prediction tensor")->required();

  CLI::App* grad = app_.add_subcommand("gradcheck", "finite-difference gradient checks");
  grad->add_option("--instances", instances_, "random instances to check");

  CLI::App* dec = app_.add_subcommand("decode", "threshold, cluster and unify predictions");
  dec->add_option("--preds", preds_path_, "binary prediction tensor")->required();
  dec->add_option("--out", out_path_, "detection CSV output")->required();

  CLI::App* ev = app_.add_subcommand("eval", "score detections against references");
  ev->add_option("--refs", refs_path_, "reference CSV")->required();
  ev->add_option("--dets", dets_path_, "detection CSV")->required();
  ev->add_flag("--overlap-only", overlap_only_, "only frames with same-class overlap");
  ev->add_option("--json", json_path_, "also write the report as JSON");

  CLI::App* tr = app_.add_subcommand("train-toy", "train the toy head on a simulated scene");
  add_scene(tr);
  add_train(tr);
  tr->add_option("--out", out_path_, "binary tensor of the trained head's predictions");
  tr->add_option("--refs-out", refs_path_, "reference CSV of the training scene");

  CLI::App* dm = app_.add_subcommand("demo", "simulate, train, decode and evaluate");
  add_scene(dm);
  add_train(dm);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app_.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out_ << app_.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err_ << "gridseld: " << e.what() << '\n';
    return 2;
  }

  try {
    if (sim->parsed()) return simulate();
    if (enc->parsed()) return encode();
    if (los->parsed()) return loss();
    if (grad->parsed()) return gradcheck();
    if (dec->parsed()) return decode();
    if (ev->parsed()) return eval();
    if (tr->parsed()) return train_toy();
    if (dm->parsed()) return demo();
  } catch (const std::exception& e) {
    err_ << "gridseld: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.run(args);
}

}  // namespace gridseld::cli
