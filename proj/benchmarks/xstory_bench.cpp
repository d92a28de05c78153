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

#include <random>

#include <benchmark/benchmark.h>

#include "testing/random_ensemble.hpp"
#include "xstory/counterfactual.hpp"
#include "xstory/shap.hpp"

namespace {

using namespace xstory;

struct ShapCase {
  TreeEnsemble ensemble;
  std::vector<double> x;
  std::vector<std::vector<double>> background;
};

ShapCase make_case(std::size_t features, std::size_t trees, int depth, std::size_t rows) {
  std::mt19937_64 rng(42);
  ShapCase c{testing::random_ensemble(rng, {features, trees, depth, 5}), {}, {}};
  c.x = testing::random_row(rng, features, 5);
  c.background = testing::random_matrix(rng, rows, features, 5);
  return c;
}

void BM_TreeShap(benchmark::State& state) {
  const ShapCase c = make_case(static_cast<std::size_t>(state.range(0)), 30, 6, 20);
  for (auto _ : state) benchmark::DoNotOptimize(shap::tree_shap_values(c.ensemble, c.x, c.background));
}
BENCHMARK(BM_TreeShap)->Arg(4)->Arg(8)->Arg(12)->Arg(23);

void BM_ExactShapley(benchmark::State& state) {
  const ShapCase c = make_case(static_cast<std::size_t>(state.range(0)), 30, 6, 20);
  const auto& names = c.ensemble.feature_names();
  const auto instance = testing::to_instance(names, c.x);
  const auto background = testing::to_background(names, c.background);
  for (auto _ : state) benchmark::DoNotOptimize(shap::exact_shapley(c.ensemble, instance, background));
}
BENCHMARK(BM_ExactShapley)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_SedcSearch(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const testing::RandomUnitModel model = testing::random_unit_model(rng, static_cast<std::size_t>(state.range(0)));
  const cf::MaskedPredictor predict = model;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(cf::sedc_search(predict, model.instance, 5, 100000));
    } catch (const cf::NotFoundError&) {
    }
  }
}
BENCHMARK(BM_SedcSearch)->Arg(5)->Arg(10)->Arg(20);

void BM_ExhaustiveMinCf(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const testing::RandomUnitModel model = testing::random_unit_model(rng, static_cast<std::size_t>(state.range(0)));
  const cf::MaskedPredictor predict = model;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(cf::exhaustive_min_cf(predict, model.instance, 5));
    } catch (const cf::NotFoundError&) {
    }
  }
}
BENCHMARK(BM_ExhaustiveMinCf)->Arg(5)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
