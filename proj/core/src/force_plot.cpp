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

#include "xstory/force_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace xstory::shap {

ForcePlotLayout layout_force_plot(const ShapTable& table) {
  ForcePlotLayout layout;
  layout.base_value = table.base_value;
  layout.score = table.score;

  std::vector<const ShapRow*> positive;
  std::vector<const ShapRow*> negative;
  for (const ShapRow& row : table.rows) {
    if (row.shap_value > 0.0) positive.push_back(&row);
    if (row.shap_value < 0.0) negative.push_back(&row);
  }
  auto by_magnitude = [](const ShapRow* a, const ShapRow* b) {
    const double ma = std::abs(a->shap_value);
    const double mb = std::abs(b->shap_value);
    if (ma != mb) return ma > mb;
    return a->feature_name < b->feature_name;
  };
  std::sort(positive.begin(), positive.end(), by_magnitude);
  std::sort(negative.begin(), negative.end(), by_magnitude);

  // Largest contributions sit next to the score marker.
  double cursor = table.score;
  for (const ShapRow* row : positive) {
    layout.segments.push_back({row->feature_name, row->feature_name + " = " + row->display_value,
                               cursor - row->shap_value, cursor, true});
    cursor -= row->shap_value;
  }
  cursor = table.score;
  for (const ShapRow* row : negative) {
    layout.segments.push_back({row->feature_name, row->feature_name + " = " + row->display_value,
                               cursor, cursor - row->shap_value, false});
    cursor -= row->shap_value;
  }
  return layout;
}

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string num4(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", v);
  return buffer;
}

constexpr const char* kPositiveColor = "#ff0d57";
constexpr const char* kNegativeColor = "#1e88e5";

}  // namespace

std::string render_force_plot_svg(const ForcePlotLayout& layout, double width_px) {
  const double margin = 40.0;
  const double bar_y = 70.0;
  const double bar_h = 26.0;
  const double height = 150.0;

  double lo = std::min(layout.base_value, layout.score);
  double hi = std::max(layout.base_value, layout.score);
  for (const ForceSegment& s : layout.segments) {
    lo = std::min(lo, s.start);
    hi = std::max(hi, s.end);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.05;
    hi += 0.05;
  }
  const double scale = (width_px - 2 * margin) / (hi - lo);
  auto px = [&](double v) { return margin + (v - lo) * scale; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_px) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width_px) + " " + num(height) + "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "  <line x1=\"" + num(margin) + "\" y1=\"" + num(bar_y + bar_h + 6) + "\" x2=\"" +
         num(width_px - margin) + "\" y2=\"" + num(bar_y + bar_h + 6) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";

  for (const ForceSegment& s : layout.segments) {
    const double x0 = px(s.start);
    const double x1 = px(s.end);
    const char* color = s.positive ? kPositiveColor : kNegativeColor;
    svg += "  <g class=\"segment\" data-feature=\"" + xml_escape(s.feature) + "\" data-start=\"" +
           num4(s.start) + "\" data-end=\"" + num4(s.end) + "\">\n";
    svg += "    <rect x=\"" + num(x0) + "\" y=\"" + num(bar_y) + "\" width=\"" + num(x1 - x0) +
           "\" height=\"" + num(bar_h) + "\" fill=\"" + color + "\" stroke=\"white\" stroke-width=\"1\"/>\n";
    // Arrow tip in the push direction.
    const double tip = s.positive ? x1 : x0;
    const double back = s.positive ? tip - 6 : tip + 6;
    svg += "    <path d=\"M" + num(back) + " " + num(bar_y) + " L" + num(tip) + " " + num(bar_y + bar_h / 2) +
           " L" + num(back) + " " + num(bar_y + bar_h) + "\" fill=\"none\" stroke=\"white\"/>\n";
    svg += "    <text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(bar_y + bar_h + 20) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\" fill=\"" + color + "\">" +
           xml_escape(s.label) + "</text>\n";
    svg += "  </g>\n";
  }

  auto marker = [&](double value, const std::string& caption, double y) {
    const double x = px(value);
    svg += "  <line x1=\"" + num(x) + "\" y1=\"" + num(bar_y - 8) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(bar_y + bar_h + 8) + "\" stroke=\"#333\" stroke-width=\"1.5\"/>\n";
    svg += "  <text x=\"" + num(x) + "\" y=\"" + num(y) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + caption + " " +
           num4(value) + "</text>\n";
  };
  marker(layout.base_value, "base value", bar_y - 32);
  marker(layout.score, "f(x)", bar_y - 14);
  svg += "</svg>\n";
  return svg;
}

}  // namespace xstory::shap
