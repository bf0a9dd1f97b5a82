#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "credulens/learn/classifiers.hpp"
#include "credulens/learn/folds.hpp"
#include "credulens/learn/metrics.hpp"
#include "credulens/learn/tasks.hpp"
#include "credulens/stats/tests.hpp"

using namespace credulens;
using namespace credulens::learn;
using Catch::Approx;

namespace {

// Two gaussian blobs; `gap` controls how separable they are.
Dataset blobs(std::size_t n_pos, std::size_t n_neg, double gap, std::uint64_t seed,
              std::size_t dims = 4) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
    const int label = i < n_pos ? 1 : 0;
    std::vector<double> row(dims);
    for (auto& v : row) v = rng.normal(label == 1 ? gap : 0.0, 1.0);
    d.rows.push_back(std::move(row));
    d.labels.push_back(label);
  }
  return d;
}

}  // namespace

TEST_CASE("balanced folds reproduce the population arithmetic") {
  std::vector<int> minority(316), majority(2522);
  std::iota(minority.begin(), minority.end(), 0);
  std::iota(majority.begin(), majority.end(), 1000);
  auto folds = balanced_folds(minority, majority, 7);
  REQUIRE(folds.size() == 8);
  for (std::size_t f = 0; f < 7; ++f) {
    CHECK(folds[f].minority.size() == 316);
    CHECK(folds[f].majority.size() == 316);
  }
  CHECK(folds[7].minority.size() == 310);
  CHECK(folds[7].majority.size() == 310);

  // majority slices partition the majority set
  std::set<int> seen;
  for (const auto& f : folds)
    for (int id : f.majority) CHECK(seen.insert(id).second);
  CHECK(seen.size() == majority.size());

  // deterministic per seed
  auto again = balanced_folds(minority, majority, 7);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    CHECK(folds[f].majority == again[f].majority);
    CHECK(folds[f].minority == again[f].minority);
  }
}

TEST_CASE("balanced folds edge cases") {
  std::vector<int> three{1, 2, 3}, other{4, 5, 6};
  auto folds = balanced_folds(three, other, 1);
  REQUIRE(folds.size() == 1);
  CHECK(folds[0].minority.size() == 3);
  CHECK(folds[0].majority.size() == 3);

  // majority smaller than minority: one partial balanced fold
  std::vector<int> small{7, 8};
  auto partial = balanced_folds(three, small, 1);
  REQUIRE(partial.size() == 1);
  CHECK(partial[0].minority.size() == 2);
  CHECK(partial[0].majority.size() == 2);

  CHECK_THROWS(balanced_folds(std::vector<int>{}, other, 1));
}

TEST_CASE("stratified folds partition the rows with balanced classes") {
  std::vector<int> labels(100);
  for (std::size_t i = 0; i < 50; ++i) labels[i] = 1;
  auto folds = stratified_folds(labels, 10, 3);
  REQUIRE(folds.size() == 10);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    CHECK(f.size() == 10);
    std::size_t pos = 0;
    for (auto i : f) {
      CHECK(seen.insert(i).second);  // no row in two test folds
      pos += labels[i] == 1;
    }
    CHECK(pos == 5);
  }
  CHECK(seen.size() == 100);
  CHECK_THROWS(stratified_folds(std::vector<int>{1, 1, 0}, 10, 0));
}

TEST_CASE("zero_r is the majority rule") {
  Dataset d;
  for (int i = 0; i < 10; ++i) {
    d.rows.push_back({static_cast<double>(i)});
    d.labels.push_back(i < 6 ? 1 : 0);
  }
  auto m = train(Algo{Algo::Kind::zero_r}, d, 1);
  CHECK(m.predict_score({{42.0}}) == Approx(0.6));
  CHECK(m.predict_label({{42.0}}) == 1);
  CHECK(m.predict_score({{-1.0}}) == m.predict_score({{99.0}}));
}

TEST_CASE("one_r finds a feature identical to the label") {
  Dataset d;
  Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2;
    // feature 0 is noise, feature 1 mirrors the label
    d.rows.push_back({rng.uniform(), static_cast<double>(label)});
    d.labels.push_back(label);
  }
  auto m = train(Algo{Algo::Kind::one_r}, d, 1);
  const auto& impl = std::get<OneRModel>(m.impl());
  CHECK(impl.feature == 1);
  CHECK(impl.training_accuracy == 1.0);
  CHECK(m.predict_label({{0.3, 1.0}}) == 1);
  CHECK(m.predict_label({{0.9, 0.0}}) == 0);
}

TEST_CASE("knn k=1 recalls training points exactly") {
  auto d = blobs(12, 12, 3.0, 17);
  Algo algo{Algo::Kind::knn};
  algo.knn.k = 1;
  auto m = train(algo, d, 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double s = m.predict_score(d.rows[i]);
    CHECK((s == 0.0 || s == 1.0));
    CHECK(m.predict_label(d.rows[i]) == d.labels[i]);
  }
}

TEST_CASE("knn standardization is learned from training data") {
  // one feature on a huge scale would swamp the distance without z-scoring
  Dataset d;
  Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    d.rows.push_back({label ? 2.0 : 0.0, rng.uniform(0.0, 1e6)});
    d.labels.push_back(label);
  }
  Algo algo{Algo::Kind::knn};
  algo.knn.k = 5;
  auto m = train(algo, d, 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    hits += m.predict_label(d.rows[i]) == d.labels[i];
  CHECK(hits == d.size());
}

TEST_CASE("info gain tree separates a thresholded signal") {
  Dataset d;
  Rng rng(11);
  for (int i = 0; i < 80; ++i) {
    const double x = rng.uniform(0.0, 10.0);
    d.rows.push_back({x, rng.uniform()});
    d.labels.push_back(x > 5.0 ? 1 : 0);
  }
  auto m = train(Algo{Algo::Kind::info_gain_tree}, d, 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    hits += m.predict_label(d.rows[i]) == d.labels[i];
  CHECK(hits == d.size());
}

TEST_CASE("forest is deterministic per seed and worker-count independent") {
  auto d = blobs(40, 40, 1.0, 23);
  Algo algo{Algo::Kind::random_forest};
  algo.forest.n_trees = 20;
  auto m1 = train(algo, d, 99, 1);
  auto m2 = train(algo, d, 99, 4);
  auto m3 = train(algo, d, 100, 1);
  auto probe = blobs(20, 20, 1.0, 24);
  bool differs_somewhere = false;
  for (const auto& row : probe.rows) {
    CHECK(m1.predict_score(row) == m2.predict_score(row));
    if (m1.predict_score(row) != m3.predict_score(row)) differs_somewhere = true;
  }
  CHECK(differs_somewhere);  // a different seed grows a different forest
}

TEST_CASE("forest scores are vote fractions") {
  auto d = blobs(30, 30, 1.5, 8);
  Algo algo{Algo::Kind::random_forest};
  algo.forest.n_trees = 10;
  auto m = train(algo, d, 5);
  for (const auto& row : d.rows) {
    const double s = m.predict_score(row);
    const double votes = s * 10.0;
    CHECK(votes == Approx(std::round(votes)).margin(1e-9));
  }
}

TEST_CASE("single-tree forest without bootstrap matches the plain tree") {
  auto d = blobs(25, 25, 1.2, 31);
  Algo forest{Algo::Kind::random_forest};
  forest.forest.n_trees = 1;
  forest.forest.features_per_split = static_cast<int>(d.n_features());
  forest.forest.bootstrap = false;
  auto fm = train(forest, d, 77);
  auto tm = train(Algo{Algo::Kind::info_gain_tree}, d, 77);
  auto probe = blobs(30, 30, 1.2, 32);
  for (const auto& row : probe.rows)
    CHECK(fm.predict_label(row) == tm.predict_label(row));
}

TEST_CASE("training preconditions") {
  Dataset single;
  single.rows = {{1.0}, {2.0}};
  single.labels = {1, 1};
  CHECK_THROWS(train(Algo{Algo::Kind::one_r}, single, 1));
  CHECK_THROWS(train(Algo{Algo::Kind::info_gain_tree}, single, 1));
  CHECK_NOTHROW(train(Algo{Algo::Kind::zero_r}, single, 1));
  auto m = train(Algo{Algo::Kind::zero_r}, single, 1);
  CHECK_THROWS(m.predict_score({{1.0, 2.0}}));  // schema mismatch
}

TEST_CASE("evaluate computes the confusion-matrix metrics") {
  std::vector<Prediction> preds{
      {1, 1, 0.9}, {1, 1, 0.8}, {1, 0, 0.2}, {0, 0, 0.1}, {0, 1, 0.7}, {0, 0, 0.3}};
  auto m = evaluate(preds);
  // tp=2 fp=1 tn=2 fn=1
  CHECK(m.accuracy_pct == Approx(100.0 * 4.0 / 6.0));
  CHECK(m.precision == Approx(2.0 / 3.0));
  CHECK(m.recall == Approx(2.0 / 3.0));
  CHECK(m.f1 == Approx(2.0 * (2.0 / 3.0) * (2.0 / 3.0) / (4.0 / 3.0)));
}

TEST_CASE("AUC endpoints: separation and full ties") {
  std::vector<Prediction> separated{{1, 1, 0.9}, {1, 1, 0.8}, {0, 0, 0.2}, {0, 0, 0.1}};
  CHECK(evaluate(separated).auc == 1.0);
  std::vector<Prediction> tied{{1, 1, 0.5}, {1, 1, 0.5}, {0, 1, 0.5}, {0, 1, 0.5}};
  CHECK(evaluate(tied).auc == 0.5);
  std::vector<Prediction> one_class{{1, 1, 0.9}, {1, 0, 0.4}};
  CHECK(!evaluate(one_class).auc.has_value());
}

TEST_CASE("AUC equals U/(n1 n2) on 200 random score sets") {
  Rng rng(606);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n_pos = 1 + rng.uniform_int(12);
    const std::size_t n_neg = 1 + rng.uniform_int(12);
    std::vector<Prediction> preds;
    std::vector<double> pos_scores, neg_scores;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
      Prediction p;
      p.truth = i < n_pos ? 1 : 0;
      // quantized scores force plenty of ties
      p.score = static_cast<double>(rng.uniform_int(6)) / 5.0;
      p.label = p.score >= 0.5 ? 1 : 0;
      (p.truth == 1 ? pos_scores : neg_scores).push_back(p.score);
      preds.push_back(p);
    }
    const double u = stats::mann_whitney_u(pos_scores, neg_scores);
    const auto auc = auc_from_predictions(preds);
    REQUIRE(auc.has_value());
    REQUIRE(*auc == Approx(u / static_cast<double>(n_pos * n_neg)).margin(1e-12));
  }
}

TEST_CASE("AUC matches exhaustive pair counting on small sets") {
  Rng rng(909);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng.uniform_int(11);  // up to 12 rows
    std::vector<Prediction> preds(n);
    std::size_t n_pos = 0;
    for (auto& p : preds) {
      p.truth = rng.bernoulli(0.5) ? 1 : 0;
      p.score = static_cast<double>(rng.uniform_int(4)) / 3.0;
      n_pos += p.truth;
    }
    if (n_pos == 0 || n_pos == n) continue;
    double pairs = 0.0;
    for (const auto& a : preds)
      for (const auto& b : preds) {
        if (a.truth != 1 || b.truth != 0) continue;
        if (a.score > b.score) pairs += 1.0;
        else if (a.score == b.score) pairs += 0.5;
      }
    const double expected = pairs / static_cast<double>(n_pos * (n - n_pos));
    REQUIRE(*auc_from_predictions(preds) == Approx(expected).margin(1e-12));
  }
}

TEST_CASE("cross_validate on separable data and its determinism") {
  auto d = blobs(50, 50, 4.0, 44);
  auto r1 = cross_validate(d, Algo{Algo::Kind::info_gain_tree}, 10, 12);
  CHECK(r1.fold_metrics.size() == 10);
  CHECK(r1.averaged.accuracy_pct >= 95.0);
  REQUIRE(r1.averaged.auc.has_value());
  CHECK(*r1.averaged.auc >= 0.9);

  auto r2 = cross_validate(d, Algo{Algo::Kind::info_gain_tree}, 10, 12, 4);
  REQUIRE(r2.fold_metrics.size() == r1.fold_metrics.size());
  for (std::size_t f = 0; f < r1.fold_metrics.size(); ++f) {
    CHECK(r1.fold_metrics[f].accuracy_pct == r2.fold_metrics[f].accuracy_pct);
    CHECK(r1.fold_metrics[f].f1 == r2.fold_metrics[f].f1);
  }
  CHECK(r1.averaged.accuracy_pct == r2.averaged.accuracy_pct);

  // averaged metric is the arithmetic mean of fold metrics
  double acc = 0.0;
  for (const auto& m : r1.fold_metrics) acc += m.accuracy_pct;
  CHECK(r1.averaged.accuracy_pct == Approx(acc / 10.0));

  CHECK_THROWS(cross_validate(blobs(4, 50, 1.0, 2), Algo{Algo::Kind::zero_r}, 10, 1));
}

TEST_CASE("credulous task builds one report entry per balanced fold") {
  // 316 positive, 2522 negative -> 7 full + 1 partial fold
  Dataset d;
  Rng rng(21);
  for (int i = 0; i < 2838; ++i) {
    d.rows.push_back({rng.uniform(), rng.uniform()});
    d.labels.push_back(i < 316 ? 1 : 0);
  }
  auto report = run_credulous_task(d, Algo{Algo::Kind::zero_r}, 9, 4);
  CHECK(report.fold_metrics.size() == 8);
}

TEST_CASE("credulous task recovers a planted signal") {
  Dataset d;
  Rng rng(87);
  for (int i = 0; i < 60 + 300; ++i) {
    const int label = i < 60 ? 1 : 0;
    std::vector<double> row(3);
    for (auto& v : row) v = rng.normal(label * 4.0, 1.0);
    d.rows.push_back(std::move(row));
    d.labels.push_back(label);
  }
  auto report = run_credulous_task(d, Algo{Algo::Kind::info_gain_tree}, 19, 5);
  CHECK(report.fold_metrics.size() == 5);
  CHECK(report.averaged.accuracy_pct >= 90.0);
}

TEST_CASE("models serialize and round-trip through json") {
  auto d = blobs(20, 20, 1.0, 55);
  for (auto kind : {Algo::Kind::zero_r, Algo::Kind::one_r, Algo::Kind::knn,
                    Algo::Kind::info_gain_tree, Algo::Kind::random_forest}) {
    Algo algo{kind};
    algo.forest.n_trees = 5;
    auto m = train(algo, d, 7);
    auto j = m.to_json();
    auto back = Model::from_json(nlohmann::json::parse(j.dump()));
    auto probe = blobs(10, 10, 1.0, 56);
    for (const auto& row : probe.rows)
      REQUIRE(m.predict_score(row) == back.predict_score(row));
  }
}

TEST_CASE("a 7-of-10 tree vote scores 0.7") {
  ForestModel forest;
  forest.params.n_trees = 10;
  for (int t = 0; t < 10; ++t) {
    TreeModel tree;
    TreeNode leaf;
    leaf.pos_rate = t < 7 ? 1.0 : 0.0;  // each tree votes via its leaf majority
    tree.nodes.push_back(leaf);
    forest.trees.push_back(tree);
  }
  Model m(Algo{Algo::Kind::random_forest}, 0, forest);
  CHECK(m.predict_score({{0.0}}) == Approx(0.7));
  CHECK(m.predict_label({{0.0}}) == 1);
}
