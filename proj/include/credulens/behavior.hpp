#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "credulens/records.hpp"
#include "credulens/rng.hpp"

// Interaction analytics: activity ratios per timeline, per-user percentages
// of bot-originated retweets/replies, representative sampling of the larger
// population, coverage curves, and decile grouping.

namespace credulens::behavior {

enum class ActionKind { retweet, reply };

inline const char* action_name(ActionKind a) {
  return a == ActionKind::retweet ? "retweet" : "reply";
}

enum class TweetCategory { pure, retweet, reply };

// A quote is a retweet with extra text; it counts as a retweet throughout.
inline TweetCategory classify_tweet_type(const TweetRecord& t) {
  switch (t.kind) {
    case TweetKind::pure: return TweetCategory::pure;
    case TweetKind::retweet:
    case TweetKind::quote: return TweetCategory::retweet;
    case TweetKind::reply: return TweetCategory::reply;
  }
  return TweetCategory::pure;
}

struct ActivityRatios {
  double pure_ratio = 0.0;
  double retweet_ratio = 0.0;
  double reply_ratio = 0.0;
};

// Empty timelines have no ratios; the caller decides how to report them.
inline std::optional<ActivityRatios> activity_ratios(std::span<const TweetRecord> timeline) {
  if (timeline.empty()) return std::nullopt;
  ActivityRatios r;
  for (const auto& t : timeline) {
    switch (classify_tweet_type(t)) {
      case TweetCategory::pure: r.pure_ratio += 1.0; break;
      case TweetCategory::retweet: r.retweet_ratio += 1.0; break;
      case TweetCategory::reply: r.reply_ratio += 1.0; break;
    }
  }
  const double n = static_cast<double>(timeline.size());
  r.pure_ratio /= n;
  r.retweet_ratio /= n;
  r.reply_ratio /= n;
  return r;
}

// Percentage of one action kind whose origin author is a bot. A user with
// zero actions of that kind is an outlier and carries no percentage.
struct ByBotMetric {
  std::string account_id;
  ActionKind action = ActionKind::retweet;
  std::int64_t total = 0;
  std::int64_t bybot = 0;
  std::optional<double> percentage;  // 100 * bybot / total when total > 0

  bool is_outlier() const { return total == 0; }
};

using BotOracle = std::function<std::optional<BotLabel>(const std::string& account_id)>;

inline ByBotMetric bybot_percentage(const std::string& account_id,
                                    std::span<const TweetRecord> timeline, ActionKind action,
                                    const BotOracle& oracle) {
  ByBotMetric m;
  m.account_id = account_id;
  m.action = action;
  const auto wanted =
      action == ActionKind::retweet ? TweetCategory::retweet : TweetCategory::reply;
  for (const auto& t : timeline) {
    if (classify_tweet_type(t) != wanted) continue;
    if (!t.origin_author_id)
      throw std::invalid_argument("bybot_percentage: reaction without origin author");
    const auto label = oracle(*t.origin_author_id);
    if (!label)
      throw std::invalid_argument("bybot_percentage: origin author not covered by oracle: " +
                                  *t.origin_author_id);
    m.total += 1;
    m.bybot += *label == BotLabel::bot;
  }
  if (m.total > 0)
    m.percentage = 100.0 * static_cast<double>(m.bybot) / static_cast<double>(m.total);
  return m;
}

// Mean and population standard deviation over non-outliers.
struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;           // non-outliers
  std::size_t n_outliers = 0;
};

inline SummaryStats summarize(std::span<const ByBotMetric> metrics) {
  SummaryStats s;
  for (const auto& m : metrics) {
    if (m.is_outlier()) {
      s.n_outliers += 1;
      continue;
    }
    s.n += 1;
    s.mean += *m.percentage;
  }
  if (s.n == 0) return s;
  s.mean /= static_cast<double>(s.n);
  for (const auto& m : metrics) {
    if (m.is_outlier()) continue;
    s.sd += (*m.percentage - s.mean) * (*m.percentage - s.mean);
  }
  s.sd = std::sqrt(s.sd / static_cast<double>(s.n));
  return s;
}

struct SampleSelection {
  std::vector<std::size_t> indices;  // into the population, in draw order
  SummaryStats stats;
  double distance = 0.0;  // euclidean distance to the population (mean, sd)
  int candidate = 0;      // which of the n_candidates won
};

// Draws `n_candidates` samples without replacement, scores each by the
// euclidean distance between its (mean, sd) and the full population's, and
// returns the closest. Ties keep the earliest candidate.
inline SampleSelection representative_sample(std::span<const ByBotMetric> population,
                                             std::size_t size, std::uint64_t seed,
                                             int n_candidates = 20) {
  if (size > population.size())
    throw std::invalid_argument("representative_sample: size exceeds population");
  const auto pop_stats = summarize(population);
  SampleSelection best;
  best.distance = std::numeric_limits<double>::infinity();
  std::vector<ByBotMetric> scratch(size);
  for (int c = 0; c < n_candidates; ++c) {
    Rng rng = Rng::substream(seed, "representative-sample", static_cast<std::uint64_t>(c));
    auto indices = rng.sample_without_replacement(population.size(), size);
    for (std::size_t i = 0; i < size; ++i) scratch[i] = population[indices[i]];
    const auto stats = summarize(scratch);
    const double dx = stats.mean - pop_stats.mean;
    const double dy = stats.sd - pop_stats.sd;
    const double distance = std::sqrt(dx * dx + dy * dy);
    if (distance < best.distance) {
      best.indices = std::move(indices);
      best.stats = stats;
      best.distance = distance;
      best.candidate = c;
    }
  }
  return best;
}

struct CoveragePoint {
  double x = 0.0;
  double pct_c_ge = 0.0;  // % of C users with value >= x
  double pct_nc_lt = 0.0; // % of NC users with value < x
};

struct CoverageCurve {
  std::vector<CoveragePoint> points;
  CoveragePoint max_point;  // maximizes pct_c_ge + pct_nc_lt, smallest x wins ties
};

inline CoverageCurve coverage_curve(std::span<const double> c_values,
                                    std::span<const double> nc_values) {
  if (c_values.empty() || nc_values.empty())
    throw std::invalid_argument("coverage_curve: empty population");
  std::set<double> thresholds(c_values.begin(), c_values.end());
  thresholds.insert(nc_values.begin(), nc_values.end());

  std::vector<double> c_sorted(c_values.begin(), c_values.end());
  std::vector<double> nc_sorted(nc_values.begin(), nc_values.end());
  std::sort(c_sorted.begin(), c_sorted.end());
  std::sort(nc_sorted.begin(), nc_sorted.end());

  CoverageCurve curve;
  double best_sum = -1.0;
  for (double x : thresholds) {
    CoveragePoint p;
    p.x = x;
    const auto c_ge = c_sorted.end() -
                      std::lower_bound(c_sorted.begin(), c_sorted.end(), x);
    const auto nc_lt = std::lower_bound(nc_sorted.begin(), nc_sorted.end(), x) -
                       nc_sorted.begin();
    p.pct_c_ge = 100.0 * static_cast<double>(c_ge) / static_cast<double>(c_sorted.size());
    p.pct_nc_lt = 100.0 * static_cast<double>(nc_lt) / static_cast<double>(nc_sorted.size());
    curve.points.push_back(p);
    if (p.pct_c_ge + p.pct_nc_lt > best_sum) {
      best_sum = p.pct_c_ge + p.pct_nc_lt;
      curve.max_point = p;
    }
  }
  return curve;
}

// Percentage bins in presentation order: (90,100] down to (0,10], then the
// dedicated zero group (only human-origin content) and the outliers (no
// actions of the kind at all). A value of exactly 100 sits in the top bin;
// exactly 0 is the zero group.
inline constexpr std::size_t kDecileBinCount = 12;

inline std::string decile_bin_label(std::size_t bin) {
  if (bin < 10) {
    const int hi = 100 - static_cast<int>(bin) * 10;
    return "[" + std::to_string(hi) + "," + std::to_string(hi - 10) + "[";
  }
  return bin == 10 ? "0" : "outliers";
}

struct DecileBin {
  std::string label;
  std::size_t count = 0;
  double percentage = 0.0;
};

inline std::size_t decile_bin_of(const ByBotMetric& m) {
  if (m.is_outlier()) return 11;
  const double v = *m.percentage;
  if (v == 0.0) return 10;
  const int hi = static_cast<int>(std::ceil(v / 10.0)) * 10;  // 95 -> 100, 90 -> 90
  return static_cast<std::size_t>((100 - std::min(hi, 100)) / 10);
}

inline std::vector<DecileBin> decile_groups(std::span<const ByBotMetric> metrics) {
  std::vector<DecileBin> bins(kDecileBinCount);
  for (std::size_t b = 0; b < kDecileBinCount; ++b) bins[b].label = decile_bin_label(b);
  for (const auto& m : metrics) bins[decile_bin_of(m)].count += 1;
  if (!metrics.empty()) {
    for (auto& b : bins)
      b.percentage = 100.0 * static_cast<double>(b.count) / static_cast<double>(metrics.size());
  }
  return bins;
}

}  // namespace credulens::behavior
