#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "credulens/learn/classifiers.hpp"
#include "credulens/learn/folds.hpp"
#include "credulens/learn/metrics.hpp"

namespace credulens::learn {

// Per-fold metrics plus their arithmetic mean. AUC averages over the folds
// where it was defined; the count of undefined folds is reported.
struct EvalReport {
  Algo algo;
  std::uint64_t seed = 0;
  std::vector<Metrics> fold_metrics;
  Metrics averaged;
  int undefined_auc_folds = 0;
};

inline Metrics average_metrics(const std::vector<Metrics>& folds, int& undefined_auc) {
  Metrics avg;
  double auc_sum = 0.0;
  int auc_n = 0;
  for (const auto& m : folds) {
    avg.accuracy_pct += m.accuracy_pct;
    avg.precision += m.precision;
    avg.recall += m.recall;
    avg.f1 += m.f1;
    if (m.auc) {
      auc_sum += *m.auc;
      ++auc_n;
    }
  }
  const double n = static_cast<double>(folds.size());
  avg.accuracy_pct /= n;
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  if (auc_n > 0) avg.auc = auc_sum / auc_n;
  undefined_auc = static_cast<int>(folds.size()) - auc_n;
  return avg;
}

inline EvalReport cross_validate(const Dataset& data, const Algo& algo, int k,
                                 std::uint64_t seed, int workers = 1) {
  EvalReport report;
  report.algo = algo;
  report.seed = seed;
  const auto test_folds = stratified_folds(data.labels, k, seed);
  report.fold_metrics.resize(test_folds.size());
  parallel_for(test_folds.size(), workers, [&](std::size_t f) {
    std::vector<char> in_test(data.size(), 0);
    for (auto i : test_folds[f]) in_test[i] = 1;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(data.size() - test_folds[f].size());
    for (std::size_t i = 0; i < data.size(); ++i)
      if (!in_test[i]) train_rows.push_back(i);
    const auto model =
        train(algo, data.subset(train_rows), Rng::substream(seed, "cv-fold", f).next_u64());
    std::vector<Prediction> preds;
    preds.reserve(test_folds[f].size());
    for (auto i : test_folds[f]) {
      Prediction p;
      p.truth = data.labels[i];
      p.score = model.predict_score(data.rows[i]);
      p.label = p.score >= 0.5 ? 1 : 0;
      preds.push_back(p);
    }
    report.fold_metrics[f] = evaluate(preds);
  });
  report.averaged = average_metrics(report.fold_metrics, report.undefined_auc_folds);
  return report;
}

// The imbalanced task: balanced folds over (minority = positive class,
// majority = negative class), a stratified cross-validation inside each
// fold, and fold results averaged into one report.
inline EvalReport run_credulous_task(const Dataset& data, const Algo& algo, std::uint64_t seed,
                                     int cv_k = 10, int workers = 1) {
  std::vector<std::size_t> minority, majority;
  for (std::size_t i = 0; i < data.size(); ++i)
    (data.labels[i] == 1 ? minority : majority).push_back(i);
  const auto folds = balanced_folds(minority, majority, seed);

  EvalReport report;
  report.algo = algo;
  report.seed = seed;
  report.fold_metrics.resize(folds.size());
  std::vector<int> fold_undefined(folds.size(), 0);
  parallel_for(folds.size(), workers, [&](std::size_t f) {
    std::vector<std::size_t> rows = folds[f].minority;
    rows.insert(rows.end(), folds[f].majority.begin(), folds[f].majority.end());
    const auto sub = data.subset(rows);
    const auto fold_report =
        cross_validate(sub, algo, cv_k, Rng::substream(seed, "balanced-fold", f).next_u64());
    report.fold_metrics[f] = fold_report.averaged;
    fold_undefined[f] = fold_report.undefined_auc_folds;
  });
  report.averaged = average_metrics(report.fold_metrics, report.undefined_auc_folds);
  report.undefined_auc_folds =
      std::accumulate(fold_undefined.begin(), fold_undefined.end(), report.undefined_auc_folds);
  return report;
}

}  // namespace credulens::learn
