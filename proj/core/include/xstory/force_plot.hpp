/*
 * Copyright 2026 The xstory Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

#include "xstory/shap.hpp"

namespace xstory::shap {

// Geometry of a force plot in model-output units. Positive attributions are
// stacked immediately left of the score and push right; negative ones are
// stacked immediately right of it and push left. Zero attributions are
// dropped.
struct ForceSegment {
  std::string feature;
  std::string label;  // "feature = display value"
  double start = 0.0;
  double end = 0.0;
  bool positive = true;

  [[nodiscard]] double width() const { return end - start; }
};

struct ForcePlotLayout {
  double base_value = 0.0;
  double score = 0.0;
  std::vector<ForceSegment> segments;  // largest |phi| first within each side
};

ForcePlotLayout layout_force_plot(const ShapTable& table);

// Static SVG rendering of a layout.
std::string render_force_plot_svg(const ForcePlotLayout& layout, double width_px = 960.0);

}  // namespace xstory::shap
