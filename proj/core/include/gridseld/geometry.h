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

#ifndef GRIDSELD_GEOMETRY_H_
#define GRIDSELD_GEOMETRY_H_

#include <array>
#include <vector>

namespace gridseld {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

// Below this separation (degrees) the distance gradient is reported as zero.
inline constexpr double kGradientGuardDeg = 1e-7;

using Vec3 = std::array<double, 3>;

// A point on the unit sphere. Azimuth is kept in [-180, 180), elevation in
// [-90, 90]; both in degrees. x = cos(el) cos(az), y = cos(el) sin(az),
// z = sin(el).
class Direction {
 public:
  Direction() = default;

  // Throws ValueError when elevation is outside [-90, 90] or either angle is
  // not finite. Azimuth is wrapped.
  static Direction from_degrees(double azimuth, double elevation);

  // Throws ValueError for a zero or non-finite vector. The input need not be
  // unit length.
  static Direction from_cartesian(const Vec3& v);

  double azimuth() const { return azimuth_; }
  double elevation() const { return elevation_; }

  Vec3 to_cartesian() const;

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  Direction(double azimuth, double elevation)
      : azimuth_(azimuth), elevation_(elevation) {}

  double azimuth_ = 0.0;
  double elevation_ = 0.0;
};

// Wraps any finite angle into [-180, 180).
double wrap_azimuth(double degrees);

// Great-circle central angle in degrees, in [0, 180].
double angular_distance(const Direction& a, const Direction& b);

struct AngleGradient {
  double d_azimuth = 0.0;
  double d_elevation = 0.0;
};

// Partial derivatives of angular_distance(a, b) with respect to a's azimuth
// and elevation (degrees per degree). Zero when the points coincide (closer
// than kGradientGuardDeg) or are antipodal.
AngleGradient angular_distance_grad(const Direction& a, const Direction& b_fixed);

// Equirectangular partition of the sphere. Cells are indexed by longitude
// column i and latitude row j; row 0 starts at -90 deg, column 0 at -180 deg.
class GridSpec {
 public:
  // Defaults: 45 x 45 degree cells with 50% overlap extension (G = 32).
  GridSpec() : GridSpec(45.0, 45.0, 0.5) {}

  // Throws ConfigError unless the cells tile the sphere exactly and
  // overlap_fraction lies in [0, 1).
  GridSpec(double cell_width, double cell_height, double overlap_fraction);

  double cell_width() const { return cell_width_; }
  double cell_height() const { return cell_height_; }
  double overlap_fraction() const { return overlap_fraction_; }

  int columns() const { return columns_; }
  int rows() const { return rows_; }
  int cell_count() const { return columns_ * rows_; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  double cell_width_;
  double cell_height_;
  double overlap_fraction_;
  int columns_;
  int rows_;
};

struct GridIndex {
  int i = 0;     // longitude column
  int j = 0;     // latitude row
  int flat = 0;  // j * columns + i

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
  friend auto operator<=>(const GridIndex& a, const GridIndex& b) {
    return a.flat <=> b.flat;
  }
};

GridIndex make_grid_index(int i, int j, const GridSpec& spec);
GridIndex grid_index_from_flat(int flat, const GridSpec& spec);

// Bounds of a base cell in degrees.
struct CellBounds {
  double azimuth_low;
  double azimuth_high;
  double elevation_low;
  double elevation_high;

  double azimuth_center() const { return 0.5 * (azimuth_low + azimuth_high); }
  double elevation_center() const {
    return 0.5 * (elevation_low + elevation_high);
  }
};
CellBounds cell_bounds(const GridIndex& cell, const GridSpec& spec);

// The unique base cell containing d. Intervals are half-open [low, high) on
// both axes; +90 deg elevation belongs to the top row.
GridIndex cell_of(const Direction& d, const GridSpec& spec);

// Every cell whose bounds, widened by overlap_fraction x cell size on each
// side, contain d. Longitude wraps around +-180; latitude is truncated at the
// poles. Widened intervals are open, and the base cell is always included.
// Result is sorted by flat index.
std::vector<GridIndex> extended_cells_of(const Direction& d, const GridSpec& spec);

}  // namespace gridseld

#endif  // GRIDSELD_GEOMETRY_H_
