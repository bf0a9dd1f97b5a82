#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "credulens/learn/dataset.hpp"
#include "credulens/learn/one_rule.hpp"
#include "credulens/parallel.hpp"
#include "credulens/rng.hpp"

namespace credulens::learn {

struct KnnParams {
  int k = 3;
};
struct TreeParams {
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
};
struct ForestParams {
  int n_trees = 100;
  int features_per_split = 0;  // 0 = ceil(sqrt(n_features))
  bool bootstrap = true;
};

struct Algo {
  enum class Kind { zero_r, one_r, knn, info_gain_tree, random_forest };
  Kind kind = Kind::random_forest;
  KnnParams knn;
  TreeParams tree;
  ForestParams forest;

  std::string name() const {
    switch (kind) {
      case Kind::zero_r: return "zero_r";
      case Kind::one_r: return "one_r";
      case Kind::knn: return "knn";
      case Kind::info_gain_tree: return "info_gain_tree";
      case Kind::random_forest: return "random_forest";
    }
    return "?";
  }

  static std::optional<Algo> parse(const std::string& s) {
    Algo a;
    if (s == "zero_r") a.kind = Kind::zero_r;
    else if (s == "one_r") a.kind = Kind::one_r;
    else if (s == "knn") a.kind = Kind::knn;
    else if (s == "tree" || s == "info_gain_tree") a.kind = Kind::info_gain_tree;
    else if (s == "forest" || s == "random_forest") a.kind = Kind::random_forest;
    else return std::nullopt;
    return a;
  }
};

namespace detail {

inline double entropy_bits(std::size_t pos, std::size_t total) {
  if (total == 0 || pos == 0 || pos == total) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(total);
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace detail

// ---- zero_r: the majority rule ----

struct ZeroRModel {
  double positive_rate = 0.0;
  double score(std::span<const double>) const { return positive_rate; }
};

// ---- one_r: the best single-attribute rule ----

struct OneRModel {
  int feature = 0;
  OneRule rule;
  double training_accuracy = 0.0;
  double score(std::span<const double> row) const { return rule.score(row[feature]); }
};

// ---- knn over z-scored features ----

struct KnnModel {
  int k = 3;
  std::vector<double> mean, sd;              // learned on training rows only
  std::vector<std::vector<double>> points;   // standardized training rows
  std::vector<int> point_labels;

  std::vector<double> standardize(std::span<const double> row) const {
    std::vector<double> z(row.size());
    for (std::size_t c = 0; c < row.size(); ++c)
      z[c] = sd[c] == 0.0 ? 0.0 : (row[c] - mean[c]) / sd[c];
    return z;
  }

  double score(std::span<const double> row) const {
    const auto z = standardize(row);
    std::vector<std::pair<double, std::size_t>> dist(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < z.size(); ++c) {
        const double diff = z[c] - points[i][c];
        d2 += diff * diff;
      }
      dist[i] = {d2, i};
    }
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < kk; ++i) pos += point_labels[dist[i].second] == 1;
    return static_cast<double>(pos) / static_cast<double>(kk);
  }
};

// ---- information-gain tree ----

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1, right = -1;
  double pos_rate = 0.0;  // leaf purity
};

struct TreeModel {
  std::vector<TreeNode> nodes;

  double score(std::span<const double> row) const {
    std::int32_t at = 0;
    while (nodes[at].feature >= 0)
      at = row[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
    return nodes[at].pos_rate;
  }
};

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best binary threshold over the candidate features: midpoints between
// consecutive distinct values, maximizing information gain. Ties go to the
// lowest feature index, then the lowest threshold (both fall out of strict
// ">" comparison in scan order).
inline SplitChoice best_split(const Dataset& data, const std::vector<std::size_t>& rows,
                              std::span<const int> features, int min_leaf) {
  SplitChoice best;
  std::size_t total_pos = 0;
  for (auto r : rows) total_pos += data.labels[r] == 1;
  const double parent = entropy_bits(total_pos, rows.size());
  if (parent == 0.0) return best;

  std::vector<std::pair<double, int>> column(rows.size());
  for (int f : features) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      column[i] = {data.rows[rows[i]][f], data.labels[rows[i]]};
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t left_pos = 0;
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      left_pos += column[i].second == 1;
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t left_n = i + 1;
      const std::size_t right_n = column.size() - left_n;
      if (left_n < static_cast<std::size_t>(min_leaf) ||
          right_n < static_cast<std::size_t>(min_leaf))
        continue;
      const double cond =
          (static_cast<double>(left_n) * entropy_bits(left_pos, left_n) +
           static_cast<double>(right_n) * entropy_bits(total_pos - left_pos, right_n)) /
          static_cast<double>(column.size());
      const double gain = parent - cond;
      if (gain > best.gain) {
        best.gain = gain;
        best.feature = f;
        best.threshold = 0.5 * (column[i].first + column[i + 1].first);
      }
    }
  }
  return best;
}

struct TreeGrower {
  const Dataset& data;
  TreeParams params;
  // When set, each split draws a fresh feature subset of size mtry.
  Rng* feature_rng = nullptr;
  int mtry = 0;
  std::vector<TreeNode> nodes;

  std::int32_t grow(std::vector<std::size_t> rows, int depth) {
    std::size_t pos = 0;
    for (auto r : rows) pos += data.labels[r] == 1;
    const auto make_leaf = [&] {
      TreeNode leaf;
      leaf.pos_rate = rows.empty() ? 0.0
                                   : static_cast<double>(pos) / static_cast<double>(rows.size());
      nodes.push_back(leaf);
      return static_cast<std::int32_t>(nodes.size() - 1);
    };
    if (pos == 0 || pos == rows.size()) return make_leaf();
    if (params.max_depth > 0 && depth >= params.max_depth) return make_leaf();
    if (rows.size() < 2 * static_cast<std::size_t>(params.min_leaf)) return make_leaf();

    std::vector<int> features;
    const int d = static_cast<int>(data.n_features());
    if (feature_rng && mtry > 0 && mtry < d) {
      auto picked = feature_rng->sample_without_replacement(static_cast<std::size_t>(d),
                                                            static_cast<std::size_t>(mtry));
      features.assign(picked.begin(), picked.end());
      std::sort(features.begin(), features.end());  // keep the index tie-break
    } else {
      features.resize(static_cast<std::size_t>(d));
      std::iota(features.begin(), features.end(), 0);
    }

    const auto split = best_split(data, rows, features, params.min_leaf);
    if (split.feature < 0 || split.gain <= 0.0) return make_leaf();

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows)
      (data.rows[r][split.feature] <= split.threshold ? left_rows : right_rows).push_back(r);

    TreeNode node;
    node.feature = split.feature;
    node.threshold = split.threshold;
    nodes.push_back(node);
    const auto at = static_cast<std::int32_t>(nodes.size() - 1);
    const auto left = grow(std::move(left_rows), depth + 1);
    const auto right = grow(std::move(right_rows), depth + 1);
    nodes[at].left = left;
    nodes[at].right = right;
    return at;
  }
};

}  // namespace detail

// ---- random forest ----

struct ForestModel {
  ForestParams params;
  std::vector<TreeModel> trees;

  // Vote fraction: each tree casts its leaf-majority label.
  double score(std::span<const double> row) const {
    std::size_t votes = 0;
    for (const auto& t : trees) votes += t.score(row) >= 0.5;
    return static_cast<double>(votes) / static_cast<double>(trees.size());
  }
};

// ---- the model wrapper ----

class Model {
 public:
  using Impl = std::variant<ZeroRModel, OneRModel, KnnModel, TreeModel, ForestModel>;

  Model() = default;
  Model(Algo algo, std::uint64_t seed, Impl impl)
      : algo_(algo), seed_(seed), impl_(std::move(impl)) {}

  const Algo& algo() const { return algo_; }
  std::uint64_t seed() const { return seed_; }

  double predict_score(std::span<const double> row) const {
    check_width(row.size());
    return std::visit([&](const auto& m) { return m.score(row); }, impl_);
  }

  // label = positive iff score >= 0.5
  int predict_label(std::span<const double> row) const {
    return predict_score(row) >= 0.5 ? 1 : 0;
  }

  std::size_t n_features() const { return n_features_; }
  void set_n_features(std::size_t n) { n_features_ = n; }
  const Impl& impl() const { return impl_; }

  nlohmann::ordered_json to_json() const;
  static Model from_json(const nlohmann::json& j);

 private:
  void check_width(std::size_t width) const {
    if (n_features_ != 0 && width != n_features_)
      throw std::invalid_argument("predict: feature count mismatch");
  }

  Algo algo_;
  std::uint64_t seed_ = 0;
  std::size_t n_features_ = 0;
  Impl impl_;
};

inline Model train(const Algo& algo, const Dataset& data, std::uint64_t seed, int workers = 1) {
  require_consistent(data);
  if (data.size() < 2) throw std::invalid_argument("train: need at least 2 rows");
  const std::size_t pos = data.count_positive();
  if (algo.kind != Algo::Kind::zero_r && (pos == 0 || pos == data.size()))
    throw std::invalid_argument("train: " + algo.name() + " needs both classes present");

  Model::Impl impl;
  switch (algo.kind) {
    case Algo::Kind::zero_r: {
      ZeroRModel m;
      m.positive_rate = static_cast<double>(pos) / static_cast<double>(data.size());
      impl = m;
      break;
    }
    case Algo::Kind::one_r: {
      OneRModel best;
      best.training_accuracy = -1.0;
      std::vector<double> column(data.size());
      for (int f = 0; f < static_cast<int>(data.n_features()); ++f) {
        for (std::size_t i = 0; i < data.size(); ++i) column[i] = data.rows[i][f];
        OneRule rule = build_one_rule(column, data.labels);
        const double acc = one_rule_training_accuracy(rule, column, data.labels);
        if (acc > best.training_accuracy) {       // ties keep the lowest index
          best.feature = f;
          best.rule = std::move(rule);
          best.training_accuracy = acc;
        }
      }
      impl = std::move(best);
      break;
    }
    case Algo::Kind::knn: {
      if (algo.knn.k < 1) throw std::invalid_argument("knn: k must be >= 1");
      KnnModel m;
      m.k = algo.knn.k;
      const std::size_t d = data.n_features();
      m.mean.assign(d, 0.0);
      m.sd.assign(d, 0.0);
      for (const auto& row : data.rows)
        for (std::size_t c = 0; c < d; ++c) m.mean[c] += row[c];
      for (auto& v : m.mean) v /= static_cast<double>(data.size());
      for (const auto& row : data.rows)
        for (std::size_t c = 0; c < d; ++c)
          m.sd[c] += (row[c] - m.mean[c]) * (row[c] - m.mean[c]);
      for (auto& v : m.sd) v = std::sqrt(v / static_cast<double>(data.size()));
      m.points.reserve(data.size());
      for (const auto& row : data.rows) m.points.push_back(m.standardize(row));
      m.point_labels = data.labels;
      impl = std::move(m);
      break;
    }
    case Algo::Kind::info_gain_tree: {
      detail::TreeGrower grower{data, algo.tree};
      std::vector<std::size_t> rows(data.size());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      grower.grow(std::move(rows), 0);
      impl = TreeModel{std::move(grower.nodes)};
      break;
    }
    case Algo::Kind::random_forest: {
      if (algo.forest.n_trees < 1) throw std::invalid_argument("forest: n_trees must be >= 1");
      ForestModel m;
      m.params = algo.forest;
      if (m.params.features_per_split <= 0)
        m.params.features_per_split = static_cast<int>(
            std::ceil(std::sqrt(static_cast<double>(data.n_features()))));
      m.trees.resize(static_cast<std::size_t>(m.params.n_trees));
      // one substream per tree, so results do not depend on worker count
      parallel_for(m.trees.size(), workers, [&](std::size_t t) {
        Rng rng = Rng::substream(seed, "forest-tree", t);
        std::vector<std::size_t> rows(data.size());
        if (m.params.bootstrap) {
          for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_int(data.size()));
        } else {
          std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        detail::TreeGrower grower{data, TreeParams{}, &rng, m.params.features_per_split};
        grower.grow(std::move(rows), 0);
        m.trees[t] = TreeModel{std::move(grower.nodes)};
      });
      impl = std::move(m);
      break;
    }
  }
  Model model(algo, seed, std::move(impl));
  model.set_n_features(data.n_features());
  return model;
}

// ---- serialization ----

inline void to_json_tree(nlohmann::ordered_json& j, const TreeModel& t) {
  j = nlohmann::ordered_json::array();
  for (const auto& n : t.nodes)
    j.push_back({{"f", n.feature},
                 {"t", n.threshold},
                 {"l", n.left},
                 {"r", n.right},
                 {"p", n.pos_rate}});
}

inline TreeModel tree_from_json(const nlohmann::json& j) {
  TreeModel t;
  for (const auto& n : j)
    t.nodes.push_back({n.at("f").get<int>(), n.at("t").get<double>(),
                       n.at("l").get<std::int32_t>(), n.at("r").get<std::int32_t>(),
                       n.at("p").get<double>()});
  return t;
}

inline nlohmann::ordered_json Model::to_json() const {
  nlohmann::ordered_json j;
  j["algo"] = algo_.name();
  j["seed"] = seed_;
  j["n_features"] = n_features_;
  if (const auto* m = std::get_if<ZeroRModel>(&impl_)) {
    j["positive_rate"] = m->positive_rate;
  } else if (const auto* m = std::get_if<OneRModel>(&impl_)) {
    j["feature"] = m->feature;
    j["training_accuracy"] = m->training_accuracy;
    j["thresholds"] = m->rule.thresholds;
    auto buckets = nlohmann::ordered_json::array();
    for (const auto& b : m->rule.buckets)
      buckets.push_back({{"p", b.pos_rate}, {"label", b.label}});
    j["buckets"] = buckets;
  } else if (const auto* m = std::get_if<KnnModel>(&impl_)) {
    j["k"] = m->k;
    j["mean"] = m->mean;
    j["sd"] = m->sd;
    j["points"] = m->points;
    j["labels"] = m->point_labels;
  } else if (const auto* m = std::get_if<TreeModel>(&impl_)) {
    to_json_tree(j["nodes"], *m);
  } else if (const auto* m = std::get_if<ForestModel>(&impl_)) {
    j["n_trees"] = m->params.n_trees;
    j["features_per_split"] = m->params.features_per_split;
    j["bootstrap"] = m->params.bootstrap;
    auto trees = nlohmann::ordered_json::array();
    for (const auto& t : m->trees) {
      nlohmann::ordered_json tj;
      to_json_tree(tj, t);
      trees.push_back(std::move(tj));
    }
    j["trees"] = std::move(trees);
  }
  return j;
}

inline Model Model::from_json(const nlohmann::json& j) {
  const auto algo = Algo::parse(j.at("algo").get<std::string>());
  if (!algo) throw std::invalid_argument("model json: unknown algo");
  Impl impl;
  switch (algo->kind) {
    case Algo::Kind::zero_r: {
      impl = ZeroRModel{j.at("positive_rate").get<double>()};
      break;
    }
    case Algo::Kind::one_r: {
      OneRModel m;
      m.feature = j.at("feature").get<int>();
      m.training_accuracy = j.at("training_accuracy").get<double>();
      m.rule.thresholds = j.at("thresholds").get<std::vector<double>>();
      for (const auto& b : j.at("buckets"))
        m.rule.buckets.push_back({b.at("p").get<double>(), b.at("label").get<int>()});
      impl = std::move(m);
      break;
    }
    case Algo::Kind::knn: {
      KnnModel m;
      m.k = j.at("k").get<int>();
      m.mean = j.at("mean").get<std::vector<double>>();
      m.sd = j.at("sd").get<std::vector<double>>();
      m.points = j.at("points").get<std::vector<std::vector<double>>>();
      m.point_labels = j.at("labels").get<std::vector<int>>();
      impl = std::move(m);
      break;
    }
    case Algo::Kind::info_gain_tree: {
      impl = tree_from_json(j.at("nodes"));
      break;
    }
    case Algo::Kind::random_forest: {
      ForestModel m;
      m.params.n_trees = j.at("n_trees").get<int>();
      m.params.features_per_split = j.at("features_per_split").get<int>();
      m.params.bootstrap = j.at("bootstrap").get<bool>();
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
      impl = std::move(m);
      break;
    }
  }
  Model model(*algo, j.at("seed").get<std::uint64_t>(), std::move(impl));
  model.set_n_features(j.at("n_features").get<std::size_t>());
  return model;
}

}  // namespace credulens::learn
