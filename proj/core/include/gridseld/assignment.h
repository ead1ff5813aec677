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

#ifndef GRIDSELD_ASSIGNMENT_H_
#define GRIDSELD_ASSIGNMENT_H_

#include <span>
#include <utility>
#include <vector>

namespace gridseld {

// Minimum-cost rectangular assignment (Hungarian method with potentials,
// O(n^2 m)). `cost` is row-major rows x cols. Returns min(rows, cols)
// (row, col) pairs sorted by row.
std::vector<std::pair<int, int>> solve_assignment(std::span<const double> cost, int rows,
                                                  int cols);

}  // namespace gridseld

#endif  // GRIDSELD_ASSIGNMENT_H_
