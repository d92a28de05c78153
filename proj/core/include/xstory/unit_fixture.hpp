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
#include <string_view>
#include <vector>

#include "xstory/counterfactual.hpp"

namespace xstory::cf {

// A table-driven predictor over maskable units, loaded from JSON:
//
//   {
//     "image_reference": "https://.../lighthouse.JPEG",
//     "units": [{"id": 0, "label": "lighthouse"}, {"id": 1, "label": "cloud"}],
//     "predictor": {
//       "default": {"class": "missile", "score": 0.91},
//       "rules": [{"masked": [1], "class": "lighthouse", "score": 0.12},
//                 {"masked": [0, 1], "exact": true, "class": "kite", "score": 0.2}]
//     }
//   }
//
// The first rule whose `masked` ids are all masked (or, with "exact", equal the
// masked set) decides the prediction; otherwise `default` applies. Scores are
// original-class probabilities.
class UnitFixture {
 public:
  struct Rule {
    UnitSet masked;
    bool exact = false;
    MaskedPrediction prediction;
  };

  static UnitFixture parse(std::string_view document, std::string_view source_name = "<fixture>");
  static UnitFixture load_file(const std::string& path);

  [[nodiscard]] const MaskableInstance& instance() const { return instance_; }
  [[nodiscard]] const std::string& image_reference() const { return image_reference_; }
  [[nodiscard]] MaskedPrediction predict(const UnitSet& masked) const;
  [[nodiscard]] MaskedPredictor predictor() const;

 private:
  MaskableInstance instance_;
  std::string image_reference_;
  MaskedPrediction default_;
  std::vector<Rule> rules_;
};

// JSON export of a search result (cf units with labels, trace, call count).
std::string result_to_json(const CounterfactualResult& result, const std::string& image_reference);

struct StoredCounterfactual {
  CounterfactualResult result;
  std::string image_reference;
};
StoredCounterfactual result_from_json(std::string_view document);

}  // namespace xstory::cf
