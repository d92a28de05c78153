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

#include "xstory/unit_fixture.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xstory/error.hpp"

namespace xstory::cf {

using json = nlohmann::json;

namespace {

MaskedPrediction parse_prediction(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("class") || !j.contains("score")) {
    throw InputError(where + ": needs 'class' and 'score'");
  }
  try {
    MaskedPrediction p{j.at("class").get<std::string>(), j.at("score").get<double>()};
    if (p.score < 0.0 || p.score > 1.0) throw InputError(where + ": score outside [0, 1]");
    return p;
  } catch (const json::exception&) {
    throw InputError(where + ": 'class' must be text and 'score' a number");
  }
}

}  // namespace

UnitFixture UnitFixture::parse(std::string_view document, std::string_view source_name) {
  const std::string src(source_name);
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(src + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw InputError(src + ": fixture must be a JSON object");

  UnitFixture fixture;
  fixture.image_reference_ = doc.value("image_reference", std::string());
  if (!doc.contains("units") || !doc["units"].is_array() || doc["units"].empty()) {
    throw InputError(src + ": 'units' must be a non-empty array");
  }
  std::set<int> ids;
  for (std::size_t i = 0; i < doc["units"].size(); ++i) {
    const json& u = doc["units"][i];
    const std::string where = src + ": units[" + std::to_string(i) + "]";
    if (!u.is_object() || !u.contains("id") || !u.contains("label") || !u["id"].is_number_integer() ||
        !u["label"].is_string()) {
      throw InputError(where + ": needs integer 'id' and text 'label'");
    }
    MaskableUnit unit{u["id"].get<int>(), u["label"].get<std::string>()};
    if (!ids.insert(unit.unit_id).second) {
      throw InputError(where + ": duplicate unit id " + std::to_string(unit.unit_id));
    }
    fixture.instance_.units.push_back(std::move(unit));
  }

  if (!doc.contains("predictor") || !doc["predictor"].is_object()) {
    throw InputError(src + ": missing 'predictor' object");
  }
  const json& predictor = doc["predictor"];
  if (!predictor.contains("default")) throw InputError(src + ": predictor needs a 'default'");
  fixture.default_ = parse_prediction(predictor["default"], src + ": predictor.default");
  if (predictor.contains("rules")) {
    if (!predictor["rules"].is_array()) throw InputError(src + ": predictor.rules must be an array");
    for (std::size_t i = 0; i < predictor["rules"].size(); ++i) {
      const json& r = predictor["rules"][i];
      const std::string where = src + ": predictor.rules[" + std::to_string(i) + "]";
      if (!r.is_object() || !r.contains("masked") || !r["masked"].is_array()) {
        throw InputError(where + ": needs a 'masked' id array");
      }
      Rule rule;
      for (const json& id : r["masked"]) {
        if (!id.is_number_integer() || !ids.contains(id.get<int>())) {
          throw InputError(where + ": masked id " + id.dump() + " is not a unit");
        }
        rule.masked.push_back(id.get<int>());
      }
      std::sort(rule.masked.begin(), rule.masked.end());
      rule.masked.erase(std::unique(rule.masked.begin(), rule.masked.end()), rule.masked.end());
      rule.exact = r.value("exact", false);
      rule.prediction = parse_prediction(r, where);
      fixture.rules_.push_back(std::move(rule));
    }
  }
  return fixture;
}

UnitFixture UnitFixture::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open fixture");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

MaskedPrediction UnitFixture::predict(const UnitSet& masked) const {
  for (const Rule& rule : rules_) {
    const bool match = rule.exact ? rule.masked == masked
                                  : std::includes(masked.begin(), masked.end(), rule.masked.begin(),
                                                  rule.masked.end());
    if (match) return rule.prediction;
  }
  return default_;
}

MaskedPredictor UnitFixture::predictor() const {
  return [fixture = *this](const UnitSet& masked) { return fixture.predict(masked); };
}

std::string result_to_json(const CounterfactualResult& result, const std::string& image_reference) {
  json doc;
  doc["original_class"] = result.original_class;
  doc["new_class"] = result.new_class;
  json units = json::array();
  for (std::size_t i = 0; i < result.cf_units.size(); ++i) {
    units.push_back({{"id", result.cf_units[i]}, {"label", result.cf_labels[i]}});
  }
  doc["cf_units"] = std::move(units);
  doc["cf_labels"] = result.cf_labels;
  doc["predictor_calls"] = result.predictor_calls;
  doc["image_reference"] = image_reference;
  json trace = json::array();
  for (const TraceEntry& e : result.trace) {
    trace.push_back({{"units", e.units}, {"score", e.score}, {"class", e.label}});
  }
  doc["trace"] = std::move(trace);
  return doc.dump(2) + "\n";
}

StoredCounterfactual result_from_json(std::string_view document) {
  try {
    const json doc = json::parse(document);
    StoredCounterfactual stored;
    CounterfactualResult& r = stored.result;
    r.original_class = doc.at("original_class").get<std::string>();
    r.new_class = doc.at("new_class").get<std::string>();
    for (const json& u : doc.at("cf_units")) {
      r.cf_units.push_back(u.at("id").get<int>());
      r.cf_labels.push_back(u.at("label").get<std::string>());
    }
    r.predictor_calls = doc.at("predictor_calls").get<std::size_t>();
    for (const json& e : doc.value("trace", json::array())) {
      r.trace.push_back({e.at("units").get<UnitSet>(), e.at("score").get<double>(),
                         e.at("class").get<std::string>()});
    }
    stored.image_reference = doc.value("image_reference", std::string());
    return stored;
  } catch (const json::exception& e) {
    throw InputError(std::string("counterfactual document: ") + e.what());
  }
}

}  // namespace xstory::cf
