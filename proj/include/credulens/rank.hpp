#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "credulens/features.hpp"
#include "credulens/learn/dataset.hpp"
#include "credulens/learn/one_rule.hpp"
#include "credulens/parallel.hpp"

// Attribute-selection evaluators: information gain, symmetric uncertainty
// and single-rule training accuracy, plus the normalized per-evaluator
// ranking over a feature matrix.

namespace credulens::rank {

enum class Evaluator { one_r, symmetric_uncertainty, info_gain };

inline const char* evaluator_name(Evaluator e) {
  switch (e) {
    case Evaluator::one_r: return "one_r";
    case Evaluator::symmetric_uncertainty: return "symmetric_uncertainty";
    case Evaluator::info_gain: return "info_gain";
  }
  return "?";
}

inline constexpr int kDiscretizationBins = 10;

namespace detail {

// Equal-frequency discretization with duplicate cut points merged. A column
// with at most `bins` distinct values keeps each value as its own bin, so
// categorical columns are never glued together. Wider columns get cuts at
// the 10-quantile positions, slid forward so equal values never split. Bin
// membership depends only on the column's order/equality pattern, so any
// strictly increasing rescaling yields the identical partition.
inline std::vector<double> quantile_boundaries(std::span<const double> values,
                                               int bins = kDiscretizationBins) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  for (double v : sorted)
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);

  std::vector<double> bounds;
  if (distinct.size() <= static_cast<std::size_t>(bins)) {
    bounds.assign(distinct.begin(), distinct.size() > 1 ? distinct.end() - 1 : distinct.begin());
    return bounds;
  }
  const std::size_t n = sorted.size();
  for (int b = 1; b < bins; ++b) {
    std::size_t q = n * static_cast<std::size_t>(b) / bins;
    while (q < n && sorted[q] == sorted[q - 1]) ++q;  // do not split a tie run
    if (q >= n) break;
    const double cut = sorted[q - 1];  // bin covers value <= cut
    if (bounds.empty() || cut != bounds.back()) bounds.push_back(cut);
  }
  return bounds;
}

inline std::vector<int> discretize(std::span<const double> values,
                                   int bins = kDiscretizationBins) {
  const auto bounds = quantile_boundaries(values, bins);
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto it = std::lower_bound(bounds.begin(), bounds.end(), values[i]);
    out[i] = static_cast<int>(it - bounds.begin());
  }
  return out;
}

inline double entropy_bits(const std::map<int, std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

struct EntropyTriple {
  double h_attr = 0.0;
  double h_label = 0.0;
  double h_label_given_attr = 0.0;
};

inline EntropyTriple entropies(std::span<const int> attr_bins, std::span<const int> labels) {
  const std::size_t n = labels.size();
  std::map<int, std::size_t> attr_counts;
  std::map<int, std::size_t> label_counts;
  std::map<int, std::map<int, std::size_t>> joint;
  for (std::size_t i = 0; i < n; ++i) {
    attr_counts[attr_bins[i]] += 1;
    label_counts[labels[i]] += 1;
    joint[attr_bins[i]][labels[i]] += 1;
  }
  EntropyTriple e;
  e.h_attr = entropy_bits(attr_counts, n);
  e.h_label = entropy_bits(label_counts, n);
  for (const auto& [bin, by_label] : joint) {
    const double w = static_cast<double>(attr_counts[bin]) / static_cast<double>(n);
    e.h_label_given_attr += w * entropy_bits(by_label, attr_counts[bin]);
  }
  return e;
}

inline void check_columns(std::span<const double> attr, std::span<const int> labels) {
  if (attr.size() != labels.size())
    throw std::invalid_argument("rank: attribute and label columns differ in length");
  if (attr.size() < 2) throw std::invalid_argument("rank: need at least 2 rows");
}

}  // namespace detail

// IG = H(label) - H(label | discretized attribute), in bits.
inline double info_gain(std::span<const double> attr, std::span<const int> labels) {
  detail::check_columns(attr, labels);
  const auto bins = detail::discretize(attr);
  const auto e = detail::entropies(bins, labels);
  return e.h_label - e.h_label_given_attr;
}

// SU = 2 IG / (H(attr) + H(label)); a constant attribute scores 0.
inline double symmetric_uncertainty(std::span<const double> attr, std::span<const int> labels) {
  detail::check_columns(attr, labels);
  const auto bins = detail::discretize(attr);
  const auto e = detail::entropies(bins, labels);
  const double denom = e.h_attr + e.h_label;
  if (denom == 0.0) return 0.0;
  return 2.0 * (e.h_label - e.h_label_given_attr) / denom;
}

// Training accuracy of a one-attribute rule.
inline double one_r_eval(std::span<const double> attr, std::span<const int> labels) {
  detail::check_columns(attr, labels);
  const auto rule = learn::build_one_rule(attr, labels);
  return learn::one_rule_training_accuracy(rule, attr, labels);
}

struct RankEntry {
  std::string feature;
  double raw_score = 0.0;
  double normalized = 0.0;  // raw / max raw over the evaluator's column
};

struct RankingReport {
  Evaluator evaluator = Evaluator::info_gain;
  std::vector<RankEntry> entries;  // sorted by normalized, descending
  int bins = kDiscretizationBins;
  int min_bucket = learn::kOneRuleMinBucket;
};

// Column names default to the ClassA ids for an 18-wide matrix and to
// C0..Cn otherwise.
inline RankingReport rank_features(const learn::Dataset& data, Evaluator evaluator,
                                   int workers = 1,
                                   const std::vector<std::string>& feature_names = {}) {
  if (data.size() < 2) throw std::invalid_argument("rank_features: need at least 2 rows");
  const std::size_t d = data.n_features();
  auto name_of = [&](std::size_t f) {
    if (f < feature_names.size()) return feature_names[f];
    if (feature_names.empty() && d == kFeatureIds.size())
      return std::string(kFeatureIds[f]);
    return "C" + std::to_string(f);
  };
  RankingReport report;
  report.evaluator = evaluator;
  report.entries.resize(d);
  parallel_for(d, workers, [&](std::size_t f) {
    std::vector<double> column(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) column[i] = data.rows[i][f];
    double raw = 0.0;
    switch (evaluator) {
      case Evaluator::one_r: raw = one_r_eval(column, data.labels); break;
      case Evaluator::symmetric_uncertainty:
        raw = symmetric_uncertainty(column, data.labels);
        break;
      case Evaluator::info_gain: raw = info_gain(column, data.labels); break;
    }
    report.entries[f] = {name_of(f), raw, 0.0};
  });
  double max_raw = 0.0;
  for (const auto& e : report.entries) max_raw = std::max(max_raw, e.raw_score);
  for (auto& e : report.entries) e.normalized = max_raw > 0.0 ? e.raw_score / max_raw : 0.0;
  // stable: equal scores keep feature-index order
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const RankEntry& a, const RankEntry& b) {
                     return a.normalized > b.normalized;
                   });
  return report;
}

}  // namespace credulens::rank
