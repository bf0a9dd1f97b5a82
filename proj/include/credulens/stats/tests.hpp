#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "credulens/parallel.hpp"
#include "credulens/rng.hpp"
#include "credulens/stats/dist.hpp"

namespace credulens::stats {

enum class Tail { one, two };

inline const char* tail_name(Tail t) { return t == Tail::one ? "one" : "two"; }

// One hypothesis-test outcome. `passed` always means the null was rejected
// at `alpha`, whatever the null is for the particular test.
struct TestResult {
  std::string test;
  std::string statistic_symbol;
  double statistic = 0.0;
  std::optional<double> df;
  std::optional<double> df2;  // second df for F
  double p_value = 1.0;
  Tail tail = Tail::two;
  double alpha = 0.05;
  bool passed = false;
  std::optional<std::size_t> n1;
  std::optional<std::size_t> n2;
};

namespace detail {

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample variance (n-1 denominator).
inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

// Midranks of the pooled values plus the tie-group sizes.
struct RankedPool {
  std::vector<double> ranks;        // parallel to the pooled input order
  std::vector<std::size_t> ties;    // sizes of tie groups (size >= 2 included as-is)
};

inline RankedPool midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  RankedPool out;
  out.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // average of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = r;
    out.ties.push_back(j - i + 1);
    i = j + 1;
  }
  return out;
}

inline double tie_sum_cubed(const std::vector<std::size_t>& ties) {
  double s = 0.0;
  for (std::size_t t : ties) {
    const double td = static_cast<double>(t);
    s += td * td * td - td;
  }
  return s;
}

inline TestResult finish(TestResult r) {
  r.passed = r.p_value < r.alpha;
  return r;
}

}  // namespace detail

// Pearson correlation coefficient.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

inline double p_from_z(double z, Tail tail) {
  const double one = dist::normal_sf(std::fabs(z));
  return tail == Tail::one ? one : std::min(1.0, 2.0 * one);
}

enum class TTestMode { paired, pooled_independent };

inline TestResult t_test(std::span<const double> x, std::span<const double> y, TTestMode mode,
                         double alpha = 0.05, Tail tail = Tail::two) {
  TestResult r;
  r.statistic_symbol = "t";
  r.tail = tail;
  r.alpha = alpha;
  r.n1 = x.size();
  r.n2 = y.size();
  if (mode == TTestMode::paired) {
    if (x.size() != y.size()) throw std::invalid_argument("t_test paired: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("t_test paired: need at least 2 pairs");
    r.test = "t_test_paired";
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    const double md = detail::mean(d);
    const double sd = std::sqrt(detail::variance(d));
    const double n = static_cast<double>(d.size());
    if (sd == 0.0) {
      if (md != 0.0) throw std::invalid_argument("t_test paired: zero variance of differences");
      r.statistic = 0.0;
    } else {
      r.statistic = md / (sd / std::sqrt(n));
    }
    r.df = n - 1.0;
  } else {
    if (x.size() < 2 || y.size() < 2)
      throw std::invalid_argument("t_test pooled: each sample needs at least 2 points");
    r.test = "t_test_pooled";
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    const double v1 = detail::variance(x);
    const double v2 = detail::variance(y);
    const double sp2 = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0);
    const double diff = detail::mean(x) - detail::mean(y);
    if (sp2 == 0.0) {
      if (diff != 0.0) throw std::invalid_argument("t_test pooled: zero pooled variance");
      r.statistic = 0.0;
    } else {
      r.statistic = diff / std::sqrt(sp2 * (1.0 / n1 + 1.0 / n2));
    }
    r.df = n1 + n2 - 2.0;
  }
  const double one = dist::student_t_sf(std::fabs(r.statistic), *r.df);
  r.p_value = tail == Tail::one ? one : std::min(1.0, 2.0 * one);
  return detail::finish(r);
}

// U for group x by the midrank method, z from the tie-corrected normal
// approximation without continuity correction. The one-tailed p is
// directional: it tests whether x tends larger than y, so p = 1 - Phi(z)
// with z signed for group x.
inline TestResult mann_whitney(std::span<const double> x, std::span<const double> y,
                               double alpha = 0.05, Tail tail = Tail::one) {
  if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney: empty sample");
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double n = n1 + n2;
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ranked = detail::midranks(pooled);
  double rank_sum_x = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) rank_sum_x += ranked.ranks[i];
  const double u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
  const double tie_term = detail::tie_sum_cubed(ranked.ties) / (n * (n - 1.0));
  const double sigma2 = n1 * n2 / 12.0 * ((n + 1.0) - tie_term);
  if (sigma2 <= 0.0)
    throw std::invalid_argument("mann_whitney: all values identical across both groups");
  TestResult r;
  r.test = "mann_whitney";
  r.statistic_symbol = "z";
  r.statistic = (u - n1 * n2 / 2.0) / std::sqrt(sigma2);
  r.p_value = tail == Tail::one ? dist::normal_sf(r.statistic) : p_from_z(r.statistic, tail);
  r.tail = tail;
  r.alpha = alpha;
  r.n1 = x.size();
  r.n2 = y.size();
  return detail::finish(r);
}

// U statistic alone (midrank method); exposed for the AUC identity.
inline double mann_whitney_u(std::span<const double> x, std::span<const double> y) {
  const double n1 = static_cast<double>(x.size());
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ranked = detail::midranks(pooled);
  double rank_sum_x = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) rank_sum_x += ranked.ranks[i];
  return rank_sum_x - n1 * (n1 + 1.0) / 2.0;
}

inline TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups,
                                 double alpha = 0.05) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis: need >= 2 groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("kruskal_wallis: empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double n = static_cast<double>(pooled.size());
  const auto ranked = detail::midranks(pooled);
  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranked.ranks[offset + i];
    h += rank_sum * rank_sum / static_cast<double>(g.size());
    offset += g.size();
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  const double correction = 1.0 - detail::tie_sum_cubed(ranked.ties) / (n * n * n - n);
  if (correction <= 0.0)
    throw std::invalid_argument("kruskal_wallis: all values identical");
  h /= correction;
  TestResult r;
  r.test = "kruskal_wallis";
  r.statistic_symbol = "H";
  r.statistic = h;
  r.df = static_cast<double>(groups.size() - 1);
  r.p_value = dist::chi2_sf(h, *r.df);
  r.tail = Tail::two;  // chi-square upper tail; non-directional
  r.alpha = alpha;
  if (groups.size() == 2) {
    r.n1 = groups[0].size();
    r.n2 = groups[1].size();
  }
  return detail::finish(r);
}

inline TestResult anova_oneway(const std::vector<std::vector<double>>& groups,
                               double alpha = 0.05) {
  if (groups.size() < 2) throw std::invalid_argument("anova_oneway: need >= 2 groups");
  double n = 0.0, grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("anova_oneway: each group needs >= 2 points");
    n += static_cast<double>(g.size());
    grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand_mean = grand_sum / n;
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    const double gm = detail::mean(g);
    ssb += static_cast<double>(g.size()) * (gm - grand_mean) * (gm - grand_mean);
    for (double v : g) ssw += (v - gm) * (v - gm);
  }
  const double k = static_cast<double>(groups.size());
  const double msw = ssw / (n - k);
  if (msw == 0.0) throw std::invalid_argument("anova_oneway: zero within-group variance");
  TestResult r;
  r.test = "anova_oneway";
  r.statistic_symbol = "F";
  r.statistic = (ssb / (k - 1.0)) / msw;
  r.df = k - 1.0;
  r.df2 = n - k;
  r.p_value = dist::f_sf(r.statistic, *r.df, *r.df2);
  r.tail = Tail::two;  // F upper tail; non-directional
  r.alpha = alpha;
  if (groups.size() == 2) {
    r.n1 = groups[0].size();
    r.n2 = groups[1].size();
  }
  return detail::finish(r);
}

namespace detail {

// Lilliefors statistic: sup distance between the empirical CDF and the
// normal fitted to the sample itself.
inline double lilliefors_d(std::vector<double> x) {
  const double n = static_cast<double>(x.size());
  const double m = mean(x);
  const double sd = std::sqrt(variance(x));
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = dist::normal_cdf((x[i] - m) / sd);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace detail

// Kolmogorov-Smirnov test of normality, Lilliefors variant. The null
// distribution of D is simulated on demand: `replicates` standard-normal
// samples of the same size, each refitted the same way. Replicate r uses
// substream (seed, "lilliefors", r), so p is independent of worker count.
inline TestResult ks_normality(std::span<const double> x, double alpha = 0.05,
                               std::uint64_t seed = 0, int replicates = 20000,
                               int workers = 1) {
  if (x.size() < 4) throw std::invalid_argument("ks_normality: need at least 4 points");
  if (replicates < 1) throw std::invalid_argument("ks_normality: need at least 1 replicate");
  std::vector<double> copy(x.begin(), x.end());
  if (detail::variance(copy) == 0.0)
    throw std::invalid_argument("ks_normality: zero sample variance");
  const double d_obs = detail::lilliefors_d(std::move(copy));

  const std::size_t n = x.size();
  std::atomic<std::int64_t> exceed{0};
  parallel_for(static_cast<std::size_t>(replicates), workers, [&](std::size_t r) {
    Rng rng = Rng::substream(seed, "lilliefors", r);
    std::vector<double> sample(n);
    for (auto& v : sample) v = rng.normal();
    if (detail::lilliefors_d(std::move(sample)) >= d_obs) exceed.fetch_add(1);
  });

  TestResult r;
  r.test = "ks_normality";
  r.statistic_symbol = "D";
  r.statistic = d_obs;
  r.p_value = (1.0 + static_cast<double>(exceed.load())) /
              (static_cast<double>(replicates) + 1.0);
  r.tail = Tail::one;  // D has a one-sided rejection region by construction
  r.alpha = alpha;
  r.n1 = n;
  return detail::finish(r);
}

}  // namespace credulens::stats
