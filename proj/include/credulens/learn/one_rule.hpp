#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

// Single-attribute rule shared by the OneR classifier and the OneR attribute
// evaluator. Numeric values are grouped into buckets: a bucket closes once
// its majority class holds at least `min_bucket_size` members and the next
// value differs (equal values never split). Adjacent buckets with the same
// majority class are merged.

namespace credulens::learn {

inline constexpr int kOneRuleMinBucket = 6;

struct OneRuleBucket {
  double pos_rate = 0.0;  // positive fraction among training rows in the bucket
  int label = 0;
};

struct OneRule {
  std::vector<double> thresholds;  // bucket i covers value <= thresholds[i]
  std::vector<OneRuleBucket> buckets;

  std::size_t bucket_of(double value) const {
    std::size_t lo = 0;
    while (lo < thresholds.size() && value > thresholds[lo]) ++lo;
    return lo;
  }
  int predict(double value) const { return buckets[bucket_of(value)].label; }
  double score(double value) const { return buckets[bucket_of(value)].pos_rate; }
};

inline OneRule build_one_rule(std::span<const double> values, std::span<const int> labels,
                              int min_bucket_size = kOneRuleMinBucket) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::size_t total_pos = 0;
  for (int l : labels) total_pos += l == 1;
  // tie-break for a split bucket: the overall majority, positive when even
  const int fallback = 2 * total_pos >= n ? 1 : 0;

  struct Raw {
    std::size_t pos = 0, count = 0;
    double last_value = 0.0;
  };
  std::vector<Raw> raw;
  Raw cur;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    cur.pos += labels[i] == 1;
    cur.count += 1;
    cur.last_value = values[i];
    const std::size_t majority = std::max(cur.pos, cur.count - cur.pos);
    const bool enough = majority >= static_cast<std::size_t>(min_bucket_size);
    const bool value_changes = k + 1 < n && values[order[k + 1]] != values[i];
    if (enough && value_changes) {
      raw.push_back(cur);
      cur = Raw{};
    }
  }
  if (cur.count > 0) {
    // leftovers that never reached the minimum merge into the last bucket
    if (!raw.empty() &&
        std::max(cur.pos, cur.count - cur.pos) < static_cast<std::size_t>(min_bucket_size)) {
      raw.back().pos += cur.pos;
      raw.back().count += cur.count;
      raw.back().last_value = cur.last_value;
    } else {
      raw.push_back(cur);
    }
  }

  auto label_of = [&](const Raw& b) {
    if (2 * b.pos > b.count) return 1;
    if (2 * b.pos < b.count) return 0;
    return fallback;
  };

  // merge adjacent buckets sharing a majority class
  std::vector<Raw> merged;
  for (const auto& b : raw) {
    if (!merged.empty() && label_of(merged.back()) == label_of(b)) {
      merged.back().pos += b.pos;
      merged.back().count += b.count;
      merged.back().last_value = b.last_value;
    } else {
      merged.push_back(b);
    }
  }

  OneRule rule;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (i + 1 < merged.size())
      rule.thresholds.push_back(merged[i].last_value);
    rule.buckets.push_back(
        {merged[i].count ? static_cast<double>(merged[i].pos) / merged[i].count : 0.0,
         label_of(merged[i])});
  }
  if (rule.buckets.empty()) rule.buckets.push_back({0.0, fallback});
  return rule;
}

inline double one_rule_training_accuracy(const OneRule& rule, std::span<const double> values,
                                         std::span<const int> labels) {
  if (values.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    hits += rule.predict(values[i]) == labels[i];
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

}  // namespace credulens::learn
