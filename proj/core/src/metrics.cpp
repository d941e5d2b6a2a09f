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

#include "scenelay/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "scenelay/error.hpp"

namespace scenelay {

VerticalLabel above_below(const BBox& subject, const BBox& box) {
  return box.cy < subject.cy ? VerticalLabel::kAbove : VerticalLabel::kBelow;
}

MacroScores acc_f1_macro(std::span<const VerticalLabel> pred,
                         std::span<const VerticalLabel> gold) {
  if (pred.size() != gold.size()) throw Error("label lists differ in length");
  if (pred.empty()) throw Error("no labels to score");

  // confusion[g][p]
  double confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    confusion[static_cast<int>(gold[i])][static_cast<int>(pred[i])] += 1.0;
  }
  double recall_sum = 0.0, f1_sum = 0.0;
  int classes = 0;
  for (int c = 0; c < 2; ++c) {
    const double tp = confusion[c][c];
    const double gold_n = confusion[c][0] + confusion[c][1];
    const double pred_n = confusion[0][c] + confusion[1][c];
    if (gold_n == 0.0 && pred_n == 0.0) continue;
    ++classes;
    const double recall = gold_n > 0.0 ? tp / gold_n : 0.0;
    const double precision = pred_n > 0.0 ? tp / pred_n : 0.0;
    recall_sum += recall;
    f1_sum += (precision + recall) > 0.0
                  ? 2.0 * precision * recall / (precision + recall)
                  : 0.0;
  }
  return {recall_sum / classes, f1_sum / classes};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("pearson: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw Error("pearson: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (sxx == 0.0 || syy == 0.0 || constant(xs) || constant(ys)) {
    throw Error("pearson: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::size_t RSquared::defined_dims() const {
  return static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), false));
}

RSquared r_squared(std::span<const std::array<double, 4>> preds,
                   std::span<const std::array<double, 4>> golds) {
  if (preds.size() != golds.size()) throw Error("r_squared: length mismatch");
  const std::size_t n = preds.size();
  if (n < 2) throw Error("r_squared: need at least 2 points");
  RSquared out;
  double total = 0.0;
  for (std::size_t d = 0; d < 4; ++d) {
    double mean = 0.0;
    for (const auto& g : golds) mean += g[d];
    mean /= static_cast<double>(n);
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dt = golds[i][d] - mean;
      const double dr = golds[i][d] - preds[i][d];
      ss_tot += dt * dt;
      ss_res += dr * dr;
    }
    const bool constant = std::all_of(golds.begin(), golds.end(), [&](const auto& g) {
      return g[d] == golds[0][d];
    });
    if (ss_tot == 0.0 || constant) {
      out.excluded[d] = true;
      continue;
    }
    total += 1.0 - ss_res / ss_tot;
  }
  if (out.defined_dims() == 0) throw Error("r_squared: every dimension is constant");
  out.value = total / static_cast<double>(out.defined_dims());
  return out;
}

MetricsReport evaluate(std::span<const EvalRecord> records) {
  const std::size_t n = records.size();
  if (n < 2) throw Error("evaluation needs at least 2 instances");
  std::vector<VerticalLabel> pred_labels, gold_labels;
  std::vector<double> px, gx, py, gy;
  std::vector<std::array<double, 4>> pv, gv;
  double iou_sum = 0.0;
  for (const auto& r : records) {
    pred_labels.push_back(above_below(r.subject, r.pred));
    gold_labels.push_back(above_below(r.subject, r.gold));
    px.push_back(r.pred.cx);
    gx.push_back(r.gold.cx);
    py.push_back(r.pred.cy);
    gy.push_back(r.gold.cy);
    pv.push_back(r.pred.as_array());
    gv.push_back(r.gold.as_array());
    iou_sum += iou(r.pred, r.gold);
  }
  MetricsReport m;
  m.n = n;
  const MacroScores macro = acc_f1_macro(pred_labels, gold_labels);
  m.acc_y = 100.0 * macro.accuracy;
  m.f1_y = 100.0 * macro.f1;
  auto maybe = [](auto&& f) -> std::optional<double> {
    try {
      return 100.0 * f();
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  m.r_x = maybe([&] { return pearson(px, gx); });
  m.r_y = maybe([&] { return pearson(py, gy); });
  m.r2 = maybe([&] { return r_squared(pv, gv).value; });
  m.iou = 100.0 * iou_sum / static_cast<double>(n);
  return m;
}

MetricsReport aggregate(std::span<const MetricsReport> folds) {
  if (folds.empty()) throw Error("no folds to aggregate");
  MetricsReport out;
  auto avg_opt = [&](std::optional<double> MetricsReport::*field) {
    double s = 0.0;
    std::size_t k = 0;
    for (const auto& f : folds) {
      if (auto v = f.*field) {
        s += *v;
        ++k;
      }
    }
    return k ? std::optional<double>(s / static_cast<double>(k)) : std::nullopt;
  };
  for (const auto& f : folds) {
    out.acc_y += f.acc_y;
    out.f1_y += f.f1_y;
    out.iou += f.iou;
    out.n += f.n;
  }
  const double k = static_cast<double>(folds.size());
  out.acc_y /= k;
  out.f1_y /= k;
  out.iou /= k;
  out.r_x = avg_opt(&MetricsReport::r_x);
  out.r_y = avg_opt(&MetricsReport::r_y);
  out.r2 = avg_opt(&MetricsReport::r2);
  return out;
}

std::string metrics_to_json(const MetricsReport& m, int indent) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j{{"acc_y", m.acc_y}, {"f1_y", m.f1_y}, {"r_x", opt(m.r_x)},
                   {"r_y", opt(m.r_y)}, {"r2", opt(m.r2)}, {"iou", m.iou},
                   {"n", m.n}};
  return j.dump(indent);
}

MetricsReport metrics_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    auto opt = [&](const char* k) -> std::optional<double> {
      if (!j.contains(k) || j[k].is_null()) return std::nullopt;
      return j[k].get<double>();
    };
    MetricsReport m;
    m.acc_y = j.at("acc_y").get<double>();
    m.f1_y = j.at("f1_y").get<double>();
    m.r_x = opt("r_x");
    m.r_y = opt("r_y");
    m.r2 = opt("r2");
    m.iou = j.at("iou").get<double>();
    m.n = j.value("n", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad metrics report: ") + e.what());
  }
}

namespace {

std::string cell(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *v);
  return buf;
}

std::string csv_cell(std::optional<double> v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

}  // namespace

void print_metrics_table(std::ostream& out, std::span<const std::string> labels,
                         std::span<const MetricsReport> rows) {
  std::size_t w = 5;
  for (const auto& l : labels) w = std::max(w, l.size());
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s %7s %7s %7s %7s %7s %7s\n",
                static_cast<int>(w), "Input", "acc_y", "F1_y", "r_x", "r_y",
                "R2", "IoU");
  out << buf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& m = rows[i];
    std::snprintf(buf, sizeof(buf), "%-*s %7s %7s %7s %7s %7s %7s\n",
                  static_cast<int>(w), i < labels.size() ? labels[i].c_str() : "",
                  cell(m.acc_y).c_str(), cell(m.f1_y).c_str(),
                  cell(m.r_x).c_str(), cell(m.r_y).c_str(), cell(m.r2).c_str(),
                  cell(m.iou).c_str());
    out << buf;
  }
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> folds) {
  out << "fold,n,acc_y,f1_y,r_x,r_y,r2,iou\n";
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const auto& m = folds[i];
    out << i << ',' << m.n << ',' << csv_cell(m.acc_y) << ',' << csv_cell(m.f1_y)
        << ',' << csv_cell(m.r_x) << ',' << csv_cell(m.r_y) << ','
        << csv_cell(m.r2) << ',' << csv_cell(m.iou) << '\n';
  }
}

}  // namespace scenelay
