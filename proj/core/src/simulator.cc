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

#include "gridseld/simulator.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gridseld/errors.h"

namespace gridseld {

void SceneSpec::validate() const {
  if (num_frames < 0 || num_classes <= 0) throw ConfigError("scene needs T >= 0 and C > 0");
  if (max_polyphony < 1) throw ConfigError("max_polyphony must be at least 1");
  auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!probability(same_class_overlap_prob) || !probability(birth_prob) ||
      !probability(death_prob)) {
    throw ConfigError("scene probabilities must lie in [0, 1]");
  }
  if (!(max_abs_elevation_deg >= 0.0 && max_abs_elevation_deg <= 90.0)) {
    throw ConfigError("max_abs_elevation_deg must lie in [0, 90]");
  }
  if (min_separation_deg < 0.0 || noise_amplitude < 0.0 || !std::isfinite(angular_velocity_deg)) {
    throw ConfigError("scene separation, noise and velocity must be finite and non-negative");
  }
}

namespace {

struct Source {
  int id;
  int class_id;
  Vec3 position;  // unit vector
  Vec3 heading;   // unit tangent at birth; drift follows the great circle
  int age = 0;
};

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

  Vec3 direction(double max_abs_elevation) {
    // Uniform on the spherical band |elevation| <= max_abs_elevation.
    const double z_max = std::sin(max_abs_elevation * kDegToRad);
    const double z = (2.0 * uniform() - 1.0) * z_max;
    const double az = (2.0 * uniform() - 1.0) * kPi;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(az), r * std::sin(az), z};
  }

  Vec3 tangent(const Vec3& p) {
    Vec3 t;
    do {
      const Vec3 g = direction(90.0);
      const double dot = g[0] * p[0] + g[1] * p[1] + g[2] * p[2];
      t = {g[0] - dot * p[0], g[1] - dot * p[1], g[2] - dot * p[2]};
    } while (t[0] * t[0] + t[1] * t[1] + t[2] * t[2] < 1e-6);
    return normalized(t);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

Scene simulate(const SceneSpec& spec) {
  spec.validate();
  SceneRng rng(spec.seed);
  std::mt19937_64 noise_engine(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<Source> active;
  std::vector<EventRow> rows;
  std::vector<int> row_sources;
  int next_id = 0;
  const double step = spec.trajectory == TrajectoryKind::kDrift
                          ? spec.angular_velocity_deg * kDegToRad
                          : 0.0;

  for (int t = 0; t < spec.num_frames; ++t) {
    std::erase_if(active, [&](const Source& s) {
      return s.age > 0 && rng.uniform() < spec.death_prob;
    });

    if (static_cast<int>(active.size()) < spec.max_polyphony && rng.uniform() < spec.birth_prob) {
      int class_id = -1;
      if (!active.empty() && rng.uniform() < spec.same_class_overlap_prob) {
        class_id = active[rng.index(static_cast<int>(active.size()))].class_id;
      } else {
        // Otherwise a class that is not sounding yet, so overlap only comes from duplication.
        std::vector<int> idle;
        for (int c = 0; c < spec.num_classes; ++c) {
          if (std::none_of(active.begin(), active.end(),
                           [&](const Source& s) { return s.class_id == c; })) {
            idle.push_back(c);
          }
        }
        if (!idle.empty()) class_id = idle[rng.index(static_cast<int>(idle.size()))];
      }
      for (int attempt = 0; class_id >= 0 && attempt < 100; ++attempt) {
        const Vec3 p = rng.direction(spec.max_abs_elevation_deg);
        const Direction candidate = Direction::from_cartesian(p);
        const bool separated = std::all_of(active.begin(), active.end(), [&](const Source& s) {
          return angular_distance(candidate, Direction::from_cartesian(s.position)) >=
                 spec.min_separation_deg;
        });
        if (separated) {
          active.push_back({next_id++, class_id, p, rng.tangent(p)});
          break;
        }
      }
    }

    for (Source& s : active) {
      const Direction d = Direction::from_cartesian(s.position);
      rows.push_back({t, s.class_id, d.azimuth(), d.elevation()});
      row_sources.push_back(s.id);
      if (step != 0.0) {
        const Vec3 p = s.position;
        const Vec3 h = s.heading;
        const double c = std::cos(step), sn = std::sin(step);
        s.position = normalized({c * p[0] + sn * h[0], c * p[1] + sn * h[1], c * p[2] + sn * h[2]});
        s.heading = normalized({c * h[0] - sn * p[0], c * h[1] - sn * p[1], c * h[2] - sn * p[2]});
      }
      ++s.age;
    }
  }

  Scene scene;
  scene.refs = events_to_reference_set(rows, spec.num_frames, spec.num_classes, spec.grid);
  // Rows are emitted in frame order; the stable (frame, class) sort is undone
  // for the source ids by re-deriving the permutation.
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rows[a].frame != rows[b].frame) return rows[a].frame < rows[b].frame;
    return rows[a].class_id < rows[b].class_id;
  });
  scene.source_ids.reserve(order.size());
  for (std::size_t i : order) scene.source_ids.push_back(row_sources[i]);

  const int width = feature_dimension(spec.num_classes);
  scene.features = Eigen::MatrixXd::Zero(spec.num_frames, width);
  for (const ReferenceEvent& e : scene.refs.events) {
    const Vec3 v = e.doa.to_cartesian();
    const int base = 4 * e.class_id;
    scene.features(e.frame, base) += 1.0;
    for (int a = 0; a < 3; ++a) scene.features(e.frame, base + 1 + a) += v[a];
  }
  if (spec.noise_amplitude > 0.0) {
    for (int t = 0; t < spec.num_frames; ++t) {
      for (int f = 0; f < width; ++f) scene.features(t, f) += spec.noise_amplitude * noise(noise_engine);
    }
  }
  return scene;
}

}  // namespace gridseld
