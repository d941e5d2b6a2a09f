/* Copyright 2026 The SceneLay Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SCENELAY_METRICS_HPP_
#define SCENELAY_METRICS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "scenelay/geometry.hpp"

namespace scenelay {

enum class VerticalLabel { kAbove, kBelow };

// kAbove iff box.cy < subject.cy; equal centers are kBelow.
VerticalLabel above_below(const BBox& subject, const BBox& box);

struct MacroScores {
  double accuracy = 0.0;  // mean per-class recall, fraction
  double f1 = 0.0;        // mean per-class F1, fraction
};

// Macro averages over {above, below}. A class missing from gold still counts
// (with recall and F1 of 0) if it was predicted; a class absent from both is
// left out. Throws Error on empty or mismatched input.
MacroScores acc_f1_macro(std::span<const VerticalLabel> pred,
                         std::span<const VerticalLabel> gold);

// Sample Pearson coefficient. Throws Error for n < 2 or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct RSquared {
  double value = 0.0;  // uniform mean over the defined dimensions
  std::array<bool, 4> excluded{};  // zero-variance dimensions
  std::size_t defined_dims() const;
};

// 1 - SS_res / SS_tot per output dimension, averaged uniformly. Throws Error
// when n < 2 or every dimension has zero variance.
RSquared r_squared(std::span<const std::array<double, 4>> preds,
                   std::span<const std::array<double, 4>> golds);

// All values in percent, as in the result tables. Correlations and R^2 are
// absent when undefined for the data (e.g. constant predictions).
struct MetricsReport {
  double acc_y = 0.0;
  double f1_y = 0.0;
  std::optional<double> r_x;
  std::optional<double> r_y;
  std::optional<double> r2;
  double iou = 0.0;
  std::size_t n = 0;
};

struct EvalRecord {
  BBox pred;
  BBox gold;
  BBox subject;
};

// Throws Error for fewer than 2 records.
MetricsReport evaluate(std::span<const EvalRecord> records);

// Uniform mean over folds; optional fields average the folds that define them.
MetricsReport aggregate(std::span<const MetricsReport> folds);

std::string metrics_to_json(const MetricsReport& m, int indent = 2);
MetricsReport metrics_from_json(const std::string& text);

// Six-column text table: acc_y F1_y r_x r_y R2 IoU.
void print_metrics_table(std::ostream& out,
                         std::span<const std::string> labels,
                         std::span<const MetricsReport> rows);

// One row per fold plus a header, for external plotting or bootstrapping.
void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> folds);

}  // namespace scenelay

#endif  // SCENELAY_METRICS_HPP_
