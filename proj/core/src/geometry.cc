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

#include "gridseld/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridseld/errors.h"

namespace gridseld {

double wrap_azimuth(double degrees) {
  if (degrees >= -180.0 && degrees < 180.0) return degrees;
  double wrapped = std::fmod(degrees + 180.0, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  wrapped -= 180.0;
  // fmod of values just below a multiple of 360 can round up to +180.
  if (wrapped >= 180.0) wrapped -= 360.0;
  return wrapped;
}

Direction Direction::from_degrees(double azimuth, double elevation) {
  if (!std::isfinite(azimuth) || !std::isfinite(elevation)) {
    throw ValueError("direction angles must be finite");
  }
  if (elevation < -90.0 || elevation > 90.0) {
    throw ValueError("elevation " + std::to_string(elevation) +
                     " outside [-90, 90]");
  }
  return Direction(wrap_azimuth(azimuth), elevation);
}

Direction Direction::from_cartesian(const Vec3& v) {
  const double horizontal = std::hypot(v[0], v[1]);
  const double norm = std::hypot(horizontal, v[2]);
  if (!std::isfinite(norm) || norm == 0.0) {
    throw ValueError("cannot build a direction from a zero or non-finite vector");
  }
  const double elevation = std::atan2(v[2], horizontal) * kRadToDeg;
  const double azimuth = horizontal == 0.0 ? 0.0 : std::atan2(v[1], v[0]) * kRadToDeg;
  return Direction(wrap_azimuth(azimuth), std::clamp(elevation, -90.0, 90.0));
}

Vec3 Direction::to_cartesian() const {
  const double az = azimuth_ * kDegToRad;
  const double el = elevation_ * kDegToRad;
  const double c = std::cos(el);
  return {c * std::cos(az), c * std::sin(az), std::sin(el)};
}

double angular_distance(const Direction& a_in, const Direction& b_in) {
  // Fixed argument order keeps the result bitwise symmetric.
  const bool swap = std::pair(a_in.elevation(), a_in.azimuth()) > std::pair(b_in.elevation(), b_in.azimuth());
  const Direction& a = swap ? b_in : a_in;
  const Direction& b = swap ? a_in : b_in;
  const double phi_a = a.elevation() * kDegToRad;
  const double phi_b = b.elevation() * kDegToRad;
  const double dlambda = (a.azimuth() - b.azimuth()) * kDegToRad;
  double cosine = std::sin(phi_a) * std::sin(phi_b) +
                  std::cos(phi_a) * std::cos(phi_b) * std::cos(dlambda);
  if (std::abs(cosine) <= 0.9) return std::acos(std::clamp(cosine, -1.0, 1.0)) * kRadToDeg;
  // acos loses precision near 0 and 180 degrees; the atan2 form is exact there.
  const double east = std::cos(phi_b) * std::sin(dlambda);
  const double north = std::cos(phi_a) * std::sin(phi_b) -
                       std::sin(phi_a) * std::cos(phi_b) * std::cos(dlambda);
  return std::atan2(std::hypot(east, north), cosine) * kRadToDeg;
}

AngleGradient angular_distance_grad(const Direction& a, const Direction& b_fixed) {
  const Vec3 u = a.to_cartesian();
  const Vec3 v = b_fixed.to_cartesian();
  const Vec3 cross = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                      u[0] * v[1] - u[1] * v[0]};
  const double sin_delta = std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] +
                                     cross[2] * cross[2]);
  const double cos_delta = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  const double delta_deg = std::atan2(sin_delta, cos_delta) * kRadToDeg;
  if (delta_deg < kGradientGuardDeg || 180.0 - delta_deg < kGradientGuardDeg) {
    return {};
  }

  const double phi_a = a.elevation() * kDegToRad;
  const double phi_b = b_fixed.elevation() * kDegToRad;
  const double dlambda = (a.azimuth() - b_fixed.azimuth()) * kDegToRad;
  // d(delta)/dx = -1/sin(delta) with x the cosine argument.
  const double dx_dlambda = -std::cos(phi_a) * std::cos(phi_b) * std::sin(dlambda);
  const double dx_dphi = std::cos(phi_a) * std::sin(phi_b) -
                         std::sin(phi_a) * std::cos(phi_b) * std::cos(dlambda);
  return {-dx_dlambda / sin_delta, -dx_dphi / sin_delta};
}

GridSpec::GridSpec(double cell_width, double cell_height, double overlap_fraction)
    : cell_width_(cell_width),
      cell_height_(cell_height),
      overlap_fraction_(overlap_fraction),
      columns_(0),
      rows_(0) {
  if (!(cell_width > 0.0) || !(cell_height > 0.0) || cell_width > 360.0 ||
      cell_height > 180.0) {
    throw ConfigError("grid cell sizes must be positive and fit the sphere");
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw ConfigError("grid overlap fraction must lie in [0, 1)");
  }
  const double columns = 360.0 / cell_width;
  const double rows = 180.0 / cell_height;
  if (std::abs(columns - std::round(columns)) > 1e-9 ||
      std::abs(rows - std::round(rows)) > 1e-9) {
    throw ConfigError("grid cells must tile the sphere: 360 mod width and "
                      "180 mod height must be zero");
  }
  columns_ = static_cast<int>(std::lround(columns));
  rows_ = static_cast<int>(std::lround(rows));
}

GridIndex make_grid_index(int i, int j, const GridSpec& spec) {
  return {i, j, j * spec.columns() + i};
}

GridIndex grid_index_from_flat(int flat, const GridSpec& spec) {
  return {flat % spec.columns(), flat / spec.columns(), flat};
}

CellBounds cell_bounds(const GridIndex& cell, const GridSpec& spec) {
  const double az_low = -180.0 + cell.i * spec.cell_width();
  const double el_low = -90.0 + cell.j * spec.cell_height();
  return {az_low, az_low + spec.cell_width(), el_low, el_low + spec.cell_height()};
}

GridIndex cell_of(const Direction& d, const GridSpec& spec) {
  int i = static_cast<int>(std::floor((d.azimuth() + 180.0) / spec.cell_width()));
  int j = static_cast<int>(std::floor((d.elevation() + 90.0) / spec.cell_height()));
  i = std::clamp(i, 0, spec.columns() - 1);
  j = std::clamp(j, 0, spec.rows() - 1);
  return make_grid_index(i, j, spec);
}

std::vector<GridIndex> extended_cells_of(const Direction& d, const GridSpec& spec) {
  const GridIndex base = cell_of(d, spec);
  const double reach_az = spec.overlap_fraction() * spec.cell_width();
  const double reach_el = spec.overlap_fraction() * spec.cell_height();

  std::vector<GridIndex> cells{base};
  if (spec.overlap_fraction() == 0.0) return cells;

  for (int dj = -1; dj <= 1; ++dj) {
    const int j = base.j + dj;
    if (j < 0 || j >= spec.rows()) continue;
    for (int di = -1; di <= 1; ++di) {
      const int i = ((base.i + di) % spec.columns() + spec.columns()) % spec.columns();
      const GridIndex cell = make_grid_index(i, j, spec);
      const CellBounds b = cell_bounds(cell, spec);
      if (!(d.elevation() > b.elevation_low - reach_el &&
            d.elevation() < b.elevation_high + reach_el)) {
        continue;
      }
      bool inside_az = false;
      for (double shift : {0.0, 360.0, -360.0}) {
        const double az = d.azimuth() + shift;
        if (az > b.azimuth_low - reach_az && az < b.azimuth_high + reach_az) {
          inside_az = true;
          break;
        }
      }
      if (inside_az) cells.push_back(cell);
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

}  // namespace gridseld
