#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace credulens::learn {

// Accuracy is a percentage; precision/recall/F1/AUC live in [0,1]. AUC is
// absent when the evaluated set lacks one of the classes.
struct Metrics {
  double accuracy_pct = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;
};

struct Prediction {
  int truth = 0;
  int label = 0;
  double score = 0.0;  // positive-class confidence
};

// Rank-statistic AUC with ties counted half: U over the positive group's
// scores divided by n_pos * n_neg.
inline std::optional<double> auc_from_predictions(std::span<const Prediction> preds) {
  const std::size_t n = preds.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return preds[a].score < preds[b].score; });
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && preds[order[j + 1]].score == preds[order[i]].score) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (preds[order[k]].truth == 1) {
        rank_sum_pos += midrank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline Metrics evaluate(std::span<const Prediction> preds) {
  if (preds.empty()) throw std::invalid_argument("evaluate: no predictions");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& p : preds) {
    if (p.truth == 1)
      (p.label == 1 ? tp : fn) += 1;
    else
      (p.label == 1 ? fp : tn) += 1;
  }
  Metrics m;
  m.accuracy_pct = 100.0 * static_cast<double>(tp + tn) / static_cast<double>(preds.size());
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.auc = auc_from_predictions(preds);
  return m;
}

}  // namespace credulens::learn
