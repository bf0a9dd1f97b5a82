#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "credulens/rank.hpp"
#include "credulens/rng.hpp"
#include "credulens/synth.hpp"
#include "credulens/features.hpp"

using namespace credulens;
using namespace credulens::rank;
using Catch::Approx;

namespace {

// Exhaustive entropy-table oracle over already-discrete columns.
double oracle_ig(const std::vector<int>& attr, const std::vector<int>& labels) {
  const double n = static_cast<double>(labels.size());
  auto entropy = [&](const std::map<int, int>& counts, double total) {
    double h = 0.0;
    for (auto& [_, c] : counts) {
      if (c == 0) continue;
      const double p = c / total;
      h -= p * std::log2(p);
    }
    return h;
  };
  std::map<int, int> lab;
  for (int l : labels) lab[l]++;
  std::map<int, std::map<int, int>> by_attr;
  std::map<int, int> attr_counts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_attr[attr[i]][labels[i]]++;
    attr_counts[attr[i]]++;
  }
  double cond = 0.0;
  for (auto& [a, m] : by_attr) cond += attr_counts[a] / n * entropy(m, attr_counts[a]);
  return entropy(lab, n) - cond;
}

double oracle_h(const std::vector<int>& vals) {
  std::map<int, int> counts;
  for (int v : vals) counts[v]++;
  double h = 0.0;
  const double n = static_cast<double>(vals.size());
  for (auto& [_, c] : counts) {
    const double p = c / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

TEST_CASE("info gain endpoints") {
  std::vector<double> attr{0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1};
  CHECK(info_gain(attr, labels) == Approx(1.0).epsilon(1e-12));

  std::vector<double> constant(8, 3.0);
  CHECK(info_gain(constant, labels) == Approx(0.0).margin(1e-12));
  CHECK(symmetric_uncertainty(constant, labels) == 0.0);

  CHECK_THROWS(info_gain(std::vector<double>{1, 2}, std::vector<int>{0}));
}

TEST_CASE("hand-computed four-row example") {
  // attr = [a,a,b,b] encoded 0/1, labels = [+,+,+,-]
  std::vector<double> attr{0, 0, 1, 1};
  std::vector<int> labels{1, 1, 1, 0};
  CHECK(info_gain(attr, labels) == Approx(0.3112781244591328).epsilon(1e-12));
  CHECK(symmetric_uncertainty(attr, labels) ==
        Approx(2.0 * 0.3112781244591328 / (1.0 + 0.8112781244591328)).epsilon(1e-12));
  CHECK(symmetric_uncertainty(attr, labels) == Approx(0.3437).margin(5e-5));
}

TEST_CASE("info gain and SU match the exhaustive oracle on all 4-row binary tables") {
  // every assignment of binary attribute and binary label over 4 rows
  for (int a = 0; a < 16; ++a) {
    for (int l = 0; l < 16; ++l) {
      std::vector<double> attr(4);
      std::vector<int> attr_i(4), labels(4);
      for (int i = 0; i < 4; ++i) {
        attr_i[i] = (a >> i) & 1;
        attr[i] = attr_i[i];
        labels[i] = (l >> i) & 1;
      }
      const double expect_ig = oracle_ig(attr_i, labels);
      REQUIRE(info_gain(attr, labels) == Approx(expect_ig).margin(1e-12));
      const double denom = oracle_h(attr_i) + oracle_h(labels);
      const double expect_su = denom == 0.0 ? 0.0 : 2.0 * expect_ig / denom;
      REQUIRE(symmetric_uncertainty(attr, labels) == Approx(expect_su).margin(1e-12));
    }
  }
}

TEST_CASE("SU is bounded and IG bounded by the marginal entropies") {
  Rng rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rng.uniform_int(40);
    std::vector<double> attr(n);
    std::vector<int> attr_i(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      attr_i[i] = static_cast<int>(rng.uniform_int(4));
      attr[i] = attr_i[i];
      labels[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    const double su = symmetric_uncertainty(attr, labels);
    REQUIRE(su >= -1e-12);
    REQUIRE(su <= 1.0 + 1e-12);
    REQUIRE(info_gain(attr, labels) <=
            std::min(oracle_h(attr_i), oracle_h(labels)) + 1e-9);
  }
}

TEST_CASE("one_r_eval training accuracies") {
  std::vector<double> attr{0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  CHECK(one_r_eval(attr, labels) == 1.0);

  // constant attribute, 60% majority -> majority fallback
  std::vector<double> constant(10, 1.0);
  std::vector<int> mostly{1, 1, 1, 1, 1, 1, 0, 0, 0, 0};
  CHECK(one_r_eval(constant, mostly) == Approx(0.6));

  // 4 values, min bucket size 6 collapses to one bucket, labels 3+/1-
  std::vector<double> small{1, 2, 3, 4};
  std::vector<int> small_labels{1, 1, 1, 0};
  CHECK(one_r_eval(small, small_labels) == Approx(0.75));
}

TEST_CASE("evaluators are invariant to bijective relabeling and monotone rescaling") {
  Rng rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 10 + rng.uniform_int(60);
    std::vector<double> attr(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      attr[i] = static_cast<double>(rng.uniform_int(5));
      labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    const double ig = info_gain(attr, labels);
    const double su = symmetric_uncertainty(attr, labels);
    const double oner = one_r_eval(attr, labels);

    // strictly monotone rescale: x -> exp(x/2) + 3x
    auto rescaled = attr;
    for (auto& v : rescaled) v = std::exp(v / 2.0) + 3.0 * v;
    REQUIRE(info_gain(rescaled, labels) == Approx(ig).margin(1e-12));
    REQUIRE(symmetric_uncertainty(rescaled, labels) == Approx(su).margin(1e-12));
    REQUIRE(one_r_eval(rescaled, labels) == Approx(oner).margin(1e-12));

    // order-reversing bijection keeps the partition for IG/SU
    auto flipped = attr;
    for (auto& v : flipped) v = 4.0 - v;
    REQUIRE(info_gain(flipped, labels) == Approx(ig).margin(1e-12));
    REQUIRE(symmetric_uncertainty(flipped, labels) == Approx(su).margin(1e-12));
  }
}

TEST_CASE("rank_features puts a label-aligned feature first with score 1.000") {
  learn::Dataset d;
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const int label = i % 2;
    d.rows.push_back({rng.uniform(), static_cast<double>(label), rng.uniform()});
    d.labels.push_back(label);
  }
  for (auto ev : {Evaluator::one_r, Evaluator::symmetric_uncertainty, Evaluator::info_gain}) {
    auto report = rank_features(d, ev);
    REQUIRE(report.entries.size() == 3);
    CHECK(report.entries[0].normalized == 1.0);
    CHECK(report.entries[0].feature == "C1");
  }
}

TEST_CASE("ranking is sorted, normalized to the max, and tie-broken by index") {
  learn::Dataset d;
  Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    // two identical informative columns, one noise column
    const double signal = label + rng.normal(0.0, 0.2);
    d.rows.push_back({signal, signal, rng.uniform()});
    d.labels.push_back(label);
  }
  auto report = rank_features(d, Evaluator::info_gain);
  REQUIRE(report.entries.size() == 3);
  CHECK(report.entries[0].raw_score == report.entries[1].raw_score);
  CHECK(report.entries[0].feature == "C0");  // tie keeps index order
  CHECK(report.entries[1].feature == "C1");
  for (std::size_t i = 1; i < report.entries.size(); ++i)
    CHECK(report.entries[i - 1].normalized >= report.entries[i].normalized);
  CHECK(report.entries[0].normalized == 1.0);
}

TEST_CASE("rank_features is worker-count independent") {
  learn::Dataset d;
  Rng rng(17);
  for (int i = 0; i < 80; ++i) {
    std::vector<double> row(6);
    for (auto& v : row) v = rng.normal();
    d.rows.push_back(std::move(row));
    d.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
  }
  auto r1 = rank_features(d, Evaluator::symmetric_uncertainty, 1);
  auto r4 = rank_features(d, Evaluator::symmetric_uncertainty, 4);
  REQUIRE(r1.entries.size() == r4.entries.size());
  for (std::size_t i = 0; i < r1.entries.size(); ++i) {
    CHECK(r1.entries[i].feature == r4.entries[i].feature);
    CHECK(r1.entries[i].raw_score == r4.entries[i].raw_score);
  }
}

TEST_CASE("a planted friends-up followers-down signal concentrates in F1") {
  // friends shifted up mildly and followers down hard: the squared
  // denominator concentrates the separation in F1
  credulens::synth::SynthConfig config;
  config.f5_shift = 1.7;
  config.f19_shift = 0.165;
  config.n_bots = 10;
  config.timeline_mean_length = 4.0;
  config.seed = 101;
  auto [corpus, gt] = credulens::synth::generate_corpus(config);
  auto matrix = credulens::extract_matrix(corpus, config.reference_date);
  auto data = credulens::learn::to_dataset(
      credulens::labeled_subset(matrix, corpus, credulens::LabelTask::credulous));

  for (auto ev : {Evaluator::one_r, Evaluator::info_gain}) {
    auto report = rank_features(data, ev);
    INFO(evaluator_name(ev));
    CHECK(report.entries[0].feature == "F1");
    CHECK(report.entries[0].normalized == 1.0);
  }
  // symmetric uncertainty divides by H(attr): a 10-bin numeric column pays
  // ~log2(10) bits where a boolean pays at most 1, so F14 (the boolean shadow
  // of the same planted ratio shift) tops SU and F1 leads the numerics.
  auto su = rank_features(data, Evaluator::symmetric_uncertainty);
  const std::vector<std::string> numerics{"F1", "F2", "F3", "F5", "F7", "F19"};
  std::string first_numeric;
  for (const auto& e : su.entries) {
    if (std::find(numerics.begin(), numerics.end(), e.feature) != numerics.end()) {
      first_numeric = e.feature;
      break;
    }
  }
  CHECK(first_numeric == "F1");
  CHECK(su.entries[0].feature == "F14");
}
