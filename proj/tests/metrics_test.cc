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

#include <map>
#include <random>

#include "gridseld/metrics.h"
#include "oracles.h"

namespace gridseld {
namespace {

Direction dir(double az, double el) { return Direction::from_degrees(az, el); }
ReferenceEvent ref(int f, int c, double az, double el) { return {f, c, dir(az, el)}; }
Detection det(int f, int c, double az, double el, double s = 0.9) { return {f, c, dir(az, el), s}; }

// Mirrors tests/fixtures/three_segment_*.csv.
std::vector<ReferenceEvent> fixture_refs() {
  return {ref(0, 0, 10, 0),  ref(1, 1, 50, 0),   ref(2, 0, -100, 20), ref(10, 2, 0, 0),
          ref(10, 2, 90, 0), ref(15, 1, 120, -40), ref(20, 0, 170, 0), ref(21, 2, 0, 45),
          ref(21, 2, 0, -45), ref(22, 1, 60, 0)};
}
std::vector<Detection> fixture_dets() {
  return {det(0, 0, 12, 0),   det(1, 1, 80, 0),    det(10, 2, 5, 0),  det(10, 2, 85, 0),
          det(12, 0, 30, 30), det(13, 1, -30, -30), det(15, 1, 120, -40), det(20, 0, -175, 0),
          det(21, 2, 0, 40),  det(22, 0, 60, 0)};
}

TEST(Metrics, ThreeSegmentFixtureMatchesHandCounts) {
  const MetricsReport r = evaluate(fixture_dets(), fixture_refs());
  // segment, N, TP, FP, FN, S, D, I -- counted by hand
  const std::vector<SegmentCounts> want = {
      {0, 3, {1, 1, 2}, 1, 1, 0},
      {1, 3, {3, 2, 0}, 0, 0, 2},
      {2, 4, {2, 1, 2}, 1, 1, 0},
  };
  EXPECT_EQ(r.segments, want);
  EXPECT_EQ(r.counts, (DetectionCounts{6, 4, 4}));
  EXPECT_EQ(r.substitutions, 2);
  EXPECT_EQ(r.deletions, 2);
  EXPECT_EQ(r.insertions, 2);
  EXPECT_EQ(r.references, 10);
  EXPECT_EQ(r.detections, 10);
  EXPECT_EQ(r.matched_pairs, 7);
  EXPECT_DOUBLE_EQ(r.er20, 0.6);
  EXPECT_DOUBLE_EQ(r.f20, 0.6);
  ASSERT_TRUE(r.le_cd_deg.has_value());
  EXPECT_NEAR(*r.le_cd_deg, 62.0 / 7.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.lr_cd, 0.7);
  EXPECT_NEAR(r.seld_error, (0.6 + 0.4 + 0.3 + 62.0 / 7.0 / 180.0) / 4, 1e-12);
}

TEST(Metrics, PerfectPredictions) {
  const auto refs = fixture_refs();
  std::vector<Detection> dets;
  for (const auto& r : refs) dets.push_back({r.frame, r.class_id, r.doa, 1.0});
  const MetricsReport r = evaluate(dets, refs);
  EXPECT_EQ(r.er20, 0.0);
  EXPECT_EQ(r.f20, 1.0);
  ASSERT_TRUE(r.le_cd_deg.has_value());
  EXPECT_EQ(*r.le_cd_deg, 0.0);
  EXPECT_EQ(r.lr_cd, 1.0);
  EXPECT_EQ(r.seld_error, 0.0);
}

TEST(Metrics, SingleMissBeyondGate) {
  const std::vector<ReferenceEvent> refs = {ref(0, 0, 0, 0)};
  const std::vector<Detection> dets = {det(0, 0, 25, 0)};
  const MetricsReport r = evaluate(dets, refs);
  EXPECT_EQ(r.counts, (DetectionCounts{0, 1, 1}));
  EXPECT_EQ(r.f20, 0.0);
  EXPECT_EQ(r.er20, 1.0);
  EXPECT_NEAR(*r.le_cd_deg, 25.0, 1e-9);
  EXPECT_EQ(r.lr_cd, 1.0);
}

TEST(Metrics, LocalizationIgnoresGate) {
  const MetricsReport r = evaluate(std::vector<Detection>{det(0, 3, 35, 0)},
                                   std::vector<ReferenceEvent>{ref(0, 3, 0, 0)});
  EXPECT_NEAR(*r.le_cd_deg, 35.0, 1e-9);
  EXPECT_EQ(r.lr_cd, 1.0);
}

TEST(MatchPerClass, Basics) {
  const std::vector<ReferenceEvent> refs = {ref(0, 0, 0, 0), ref(0, 0, 90, 0), ref(1, 0, 0, 0)};
  std::vector<Detection> dets = {det(0, 0, 5, 0)};
  FrameClassMatch m = match_per_class(dets, refs, 0, 0);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_NEAR(m.pairs[0].distance_deg, 5.0, 1e-9);
  EXPECT_EQ(m.pairs[0].reference, 0);
  EXPECT_EQ(m.unmatched_references, std::vector<int>{1});
  m = match_per_class({}, refs, 0, 0);
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(m.unmatched_references.size(), 2u);
  // Crossing: the greedy nearest pair would be wrong.
  dets = {det(0, 0, 40, 0), det(0, 0, 100, 0)};
  m = match_per_class(dets, refs, 0, 0);
  ASSERT_EQ(m.pairs.size(), 2u);
  double total = 0;
  for (const auto& p : m.pairs) total += p.distance_deg;
  EXPECT_NEAR(total, 40 + 10, 1e-9);
}

TEST(MatchPerClass, MinimizesTotalDistance) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int nd = static_cast<int>(rng() % 6), nr = static_cast<int>(rng() % 6);
    std::vector<Detection> dets;
    std::vector<ReferenceEvent> refs;
    for (int i = 0; i < nd; ++i) dets.push_back({0, 0, oracle::random_direction(rng), 0.9});
    for (int i = 0; i < nr; ++i) refs.push_back({0, 0, oracle::random_direction(rng)});
    const FrameClassMatch m = match_per_class(dets, refs, 0, 0);
    ASSERT_EQ(static_cast<int>(m.pairs.size()), std::min(nd, nr));
    EXPECT_EQ(m.unmatched_detections.size() + m.pairs.size(), static_cast<std::size_t>(nd));
    EXPECT_EQ(m.unmatched_references.size() + m.pairs.size(), static_cast<std::size_t>(nr));
    if (nd == 0 || nr == 0) continue;
    std::vector<double> cost;
    for (const auto& d : dets)
      for (const auto& r : refs) cost.push_back(oracle::distance(d.doa, r.doa));
    double total = 0;
    for (const auto& p : m.pairs) total += p.distance_deg;
    EXPECT_NEAR(total, oracle::best_assignment_cost(cost, nd, nr), 1e-9);
  }
}

TEST(SeldError, KnownScoreRows) {
  EXPECT_NEAR(seld_error(0.7802, 0.2759, 24.69, 0.5262), 0.5288, 5e-4);
  EXPECT_NEAR(seld_error(0.4818, 0.6127, 8.60, 0.6975), 0.3048, 5e-4);
  EXPECT_EQ(seld_error(0, 1, 0.0, 1), 0.0);
}

TEST(SeldError, UndefinedLocalizationCountsAsWorst) {
  EXPECT_DOUBLE_EQ(seld_error(0.2, 0.7, std::nullopt, 0.5), (0.2 + 0.3 + 0.5 + 1.0) / 4);
  EXPECT_DOUBLE_EQ(seld_error(0.2, 0.7, 36.0, 0.5), (0.2 + 0.3 + 0.5 + 0.2) / 4);
}

TEST(Metrics, EmptyInputsStayFinite) {
  const MetricsReport none = evaluate({}, {});
  EXPECT_EQ(none.er20, 0.0);
  EXPECT_TRUE(none.er20_defined);
  EXPECT_EQ(none.f20, 1.0);
  EXPECT_EQ(none.lr_cd, 1.0);
  EXPECT_FALSE(none.le_cd_deg.has_value());
  EXPECT_TRUE(std::isfinite(none.seld_error));

  const MetricsReport missed = evaluate({}, fixture_refs());
  EXPECT_EQ(missed.er20, 1.0);
  EXPECT_EQ(missed.f20, 0.0);
  EXPECT_EQ(missed.lr_cd, 0.0);
  EXPECT_FALSE(missed.le_cd_deg.has_value());
  EXPECT_DOUBLE_EQ(missed.seld_error, 1.0);

  const MetricsReport phantom = evaluate(fixture_dets(), {});
  EXPECT_FALSE(phantom.er20_defined);
  EXPECT_TRUE(std::isfinite(phantom.er20));
  EXPECT_EQ(phantom.er20, 10.0);
  EXPECT_EQ(phantom.f20, 0.0);
  EXPECT_TRUE(std::isfinite(phantom.seld_error));
}

TEST(Metrics, CoincidentDetectionsAndReferences) {
  const std::vector<ReferenceEvent> refs = {ref(0, 0, 0, 90), ref(0, 0, 0, 90), ref(0, 0, 0, 90)};
  const std::vector<Detection> dets = {det(0, 0, 45, 90), det(0, 0, -45, 90)};
  const MetricsReport r = evaluate(dets, refs);
  EXPECT_EQ(r.counts, (DetectionCounts{2, 0, 1}));
  EXPECT_NEAR(*r.le_cd_deg, 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(r.seld_error));
}

struct Scenario {
  std::vector<Detection> dets;
  std::vector<ReferenceEvent> refs;
};

Scenario random_scenario(std::uint64_t seed, int frames = 40) {
  std::mt19937_64 rng(seed);
  Scenario s;
  std::normal_distribution<double> jitter(0, 15);
  for (int f = 0; f < frames; ++f) {
    const int n = static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      const ReferenceEvent r{f, static_cast<int>(rng() % 3), oracle::random_direction(rng, 70)};
      s.refs.push_back(r);
      if (rng() % 4 != 0) {
        const double el = std::clamp(r.doa.elevation() + jitter(rng), -90.0, 90.0);
        const int cls = rng() % 6 == 0 ? static_cast<int>(rng() % 3) : r.class_id;
        s.dets.push_back({f, cls, dir(r.doa.azimuth() + jitter(rng), el), 0.8});
      }
    }
    if (rng() % 5 == 0) {
      s.dets.push_back({f, static_cast<int>(rng() % 3), oracle::random_direction(rng), 0.6});
    }
  }
  return s;
}

// Segment-pooled counts written out directly, matching by permutation search.
struct OracleTotals {
  long tp = 0, fp = 0, fn = 0, s = 0, d = 0, i = 0, n = 0, pairs = 0;
  double distance = 0;
};

OracleTotals oracle_totals(const Scenario& sc, int frames_per_segment) {
  std::map<int, OracleTotals> seg;
  std::set<std::pair<int, int>> keys;
  for (const auto& d : sc.dets) keys.insert({d.frame, d.class_id});
  for (const auto& r : sc.refs) keys.insert({r.frame, r.class_id});
  for (auto [f, c] : keys) {
    std::vector<Direction> D, R;
    for (const auto& d : sc.dets)
      if (d.frame == f && d.class_id == c) D.push_back(d.doa);
    for (const auto& r : sc.refs)
      if (r.frame == f && r.class_id == c) R.push_back(r.doa);
    OracleTotals& t = seg[f / frames_per_segment];
    t.n += static_cast<long>(R.size());
    // Enumerate injective maps of the smaller side into the larger.
    const bool dets_small = D.size() <= R.size();
    const auto& small = dets_small ? D : R;
    const auto& large = dets_small ? R : D;
    std::vector<int> perm(large.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    std::vector<double> best_d;
    do {
      double total = 0;
      std::vector<double> ds;
      for (std::size_t a = 0; a < small.size(); ++a) {
        ds.push_back(oracle::distance(small[a], large[perm[a]]));
        total += ds.back();
      }
      if (total < best - 1e-12) {
        best = total;
        best_d = ds;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    long tp = 0;
    for (double x : best_d) {
      tp += x < 20 ? 1 : 0;
      t.distance += x;
      ++t.pairs;
    }
    t.tp += tp;
    t.fp += static_cast<long>(D.size()) - tp;
    t.fn += static_cast<long>(R.size()) - tp;
  }
  OracleTotals all;
  for (auto& [k, t] : seg) {
    all.tp += t.tp;
    all.fp += t.fp;
    all.fn += t.fn;
    all.s += std::min(t.fn, t.fp);
    all.d += std::max(0L, t.fn - t.fp);
    all.i += std::max(0L, t.fp - t.fn);
    all.n += t.n;
    all.pairs += t.pairs;
    all.distance += t.distance;
  }
  return all;
}

TEST(Metrics, MatchesLoopOracleOnRandomScenarios) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario sc = random_scenario(seed);
    const MetricsReport r = evaluate(sc.dets, sc.refs);
    const OracleTotals o = oracle_totals(sc, 10);
    EXPECT_EQ(r.counts, (DetectionCounts{o.tp, o.fp, o.fn})) << seed;
    EXPECT_EQ(r.substitutions, o.s);
    EXPECT_EQ(r.deletions, o.d);
    EXPECT_EQ(r.insertions, o.i);
    EXPECT_EQ(r.matched_pairs, o.pairs);
    ASSERT_GT(o.n, 0);
    EXPECT_NEAR(r.er20, static_cast<double>(o.s + o.d + o.i) / o.n, 1e-12);
    EXPECT_NEAR(r.f20, 2.0 * o.tp / (2.0 * o.tp + o.fp + o.fn), 1e-12);
    EXPECT_NEAR(*r.le_cd_deg, o.distance / o.pairs, 1e-9);
    EXPECT_NEAR(r.lr_cd, static_cast<double>(o.pairs) / o.n, 1e-12);
    EXPECT_NEAR(r.seld_error,
                (r.er20 + (1 - r.f20) + (1 - r.lr_cd) + *r.le_cd_deg / 180.0) / 4, 1e-15);
  }
}

TEST(Metrics, DetectionOrderDoesNotMatter) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Scenario sc = random_scenario(seed + 200);
    const MetricsReport a = evaluate(sc.dets, sc.refs);
    std::mt19937_64 rng(seed);
    std::shuffle(sc.dets.begin(), sc.dets.end(), rng);
    const MetricsReport b = evaluate(sc.dets, sc.refs);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NEAR(a.er20, b.er20, 1e-12);
    EXPECT_NEAR(a.f20, b.f20, 1e-12);
    EXPECT_NEAR(*a.le_cd_deg, *b.le_cd_deg, 1e-12);
    EXPECT_NEAR(a.lr_cd, b.lr_cd, 1e-12);
    EXPECT_NEAR(a.seld_error, b.seld_error, 1e-12);
  }
}

TEST(Metrics, AddingDetectionOnMissedReferenceNeverHurts) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Scenario sc = random_scenario(seed + 400);
    const MetricsReport before = evaluate(sc.dets, sc.refs);
    // Find a reference with no same-frame, same-class detection.
    for (const auto& r : sc.refs) {
      const bool covered = std::any_of(sc.dets.begin(), sc.dets.end(), [&](const Detection& d) {
        return d.frame == r.frame && d.class_id == r.class_id;
      });
      if (covered) continue;
      std::vector<Detection> more = sc.dets;
      more.push_back({r.frame, r.class_id, r.doa, 0.9});
      const MetricsReport after = evaluate(more, sc.refs);
      EXPECT_LE(after.er20, before.er20 + 1e-12) << seed;
      EXPECT_GE(after.f20, before.f20 - 1e-12) << seed;
      EXPECT_GE(after.lr_cd, before.lr_cd - 1e-12) << seed;
      break;
    }
  }
}

TEST(Metrics, TimelineDoublingIsInvariant) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scenario sc = random_scenario(seed + 600);
    Scenario twice;
    for (const auto& d : sc.dets) {
      twice.dets.push_back({2 * d.frame, d.class_id, d.doa, d.score});
      twice.dets.push_back({2 * d.frame + 1, d.class_id, d.doa, d.score});
    }
    for (const auto& r : sc.refs) {
      twice.refs.push_back({2 * r.frame, r.class_id, r.doa});
      twice.refs.push_back({2 * r.frame + 1, r.class_id, r.doa});
    }
    MetricsConfig doubled;
    doubled.labels_per_second = 20;
    const MetricsReport a = evaluate(sc.dets, sc.refs);
    const MetricsReport b = evaluate(twice.dets, twice.refs, doubled);
    EXPECT_NEAR(a.er20, b.er20, 1e-12);
    EXPECT_NEAR(a.f20, b.f20, 1e-12);
    EXPECT_NEAR(*a.le_cd_deg, *b.le_cd_deg, 1e-9);
    EXPECT_NEAR(a.lr_cd, b.lr_cd, 1e-12);
    EXPECT_NEAR(a.seld_error, b.seld_error, 1e-12);
  }
}

TEST(Metrics, OverlapOnlyKeepsSameClassOverlapFrames) {
  MetricsConfig cfg;
  cfg.overlap_only = true;
  const MetricsReport r = evaluate(fixture_dets(), fixture_refs(), cfg);
  // Frames 10 and 21 carry two same-class references.
  EXPECT_EQ(r.frames_evaluated, 2);
  EXPECT_EQ(r.references, 4);
  EXPECT_EQ(r.detections, 3);
  EXPECT_EQ(r.counts, (DetectionCounts{3, 0, 1}));
}

TEST(MetricsConfig, FramesPerSegment) {
  EXPECT_EQ(MetricsConfig{}.frames_per_segment(), 10);
  MetricsConfig c;
  c.labels_per_second = 50;
  EXPECT_EQ(c.frames_per_segment(), 50);
}

}  // namespace
}  // namespace gridseld
