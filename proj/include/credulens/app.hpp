#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "credulens/behavior.hpp"
#include "credulens/features.hpp"
#include "credulens/ingest.hpp"
#include "credulens/learn/tasks.hpp"
#include "credulens/plots.hpp"
#include "credulens/rank.hpp"
#include "credulens/report.hpp"
#include "credulens/stats/tests.hpp"
#include "credulens/synth.hpp"

// Batch pipeline wiring: one RunConfig drives every subcommand, and the
// pipeline subcommand is literally the other subcommands run in sequence
// against the same resolved configuration.

namespace credulens::app {

struct RunConfig {
  // inputs
  std::string accounts_path;
  std::string tweets_path;
  std::string labels_path;      // credulous labels csv
  std::string bot_oracle_path;  // bot labels csv, or a trained model json
  bool synth_defaults = false;  // generate the corpus in-process instead
  synth::SynthConfig synth;

  // value-file mode for the stats subcommand
  std::string x_path;
  std::string y_path;

  // analysis knobs
  std::string algo = "forest";
  int cv_k = 10;
  int knn_k = 3;
  int trees = 100;
  int max_depth = 0;
  int min_leaf = 1;
  int mtry = 0;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  stats::Tail mw_tail = stats::Tail::one;  // --tail, applies to Mann-Whitney
  std::string t_mode = "paired";           // feature-battery t-test mode
  std::optional<Date> reference_date;
  double f15_lo = 50.0;
  double f15_hi = 150.0;
  std::optional<std::int64_t> friend_cap;
  int lilliefors_replicates = 20000;

  // execution (not decision-bearing: excluded from the config digest)
  int workers = 1;
  std::string out_dir = ".";
  bool plots = false;
  bool force = false;
};

inline learn::Algo resolve_algo(const RunConfig& cfg) {
  auto algo = learn::Algo::parse(cfg.algo);
  if (!algo) throw std::runtime_error("unknown --algo: " + cfg.algo);
  algo->knn.k = cfg.knn_k;
  algo->tree.max_depth = cfg.max_depth;
  algo->tree.min_leaf = cfg.min_leaf;
  algo->forest.n_trees = cfg.trees;
  algo->forest.features_per_split = cfg.mtry;
  return *algo;
}

// Canonical string over every decision-bearing constant. Paths, workers and
// output options stay out so a rerun elsewhere stays byte-identical.
inline std::string canonical_config(const RunConfig& cfg, const Date& resolved_reference) {
  std::ostringstream s;
  s << "seed=" << cfg.seed << ";alpha=" << cfg.alpha
    << ";tail=" << stats::tail_name(cfg.mw_tail) << ";t_mode=" << cfg.t_mode
    << ";reference=" << format_date(resolved_reference) << ";f15=" << cfg.f15_lo << ':'
    << cfg.f15_hi << ";friend_cap="
    << (cfg.friend_cap ? std::to_string(*cfg.friend_cap) : std::string("none"))
    << ";algo=" << cfg.algo << ";cv_k=" << cfg.cv_k << ";knn_k=" << cfg.knn_k
    << ";trees=" << cfg.trees << ";max_depth=" << cfg.max_depth
    << ";min_leaf=" << cfg.min_leaf << ";mtry=" << cfg.mtry
    << ";lilliefors=" << cfg.lilliefors_replicates;
  if (cfg.synth_defaults) {
    const auto& sc = cfg.synth;
    s << ";synth=" << sc.n_credulous << ',' << sc.n_not_credulous << ',' << sc.n_bots << ','
      << sc.f3_shift << ',' << sc.f5_shift << ',' << sc.f19_shift << ','
      << sc.c_retweet.mean_pct << ',' << sc.c_retweet.sd_pct << ',' << sc.nc_retweet.mean_pct
      << ',' << sc.nc_retweet.sd_pct << ',' << sc.c_reply.mean_pct << ','
      << sc.c_reply.sd_pct << ',' << sc.nc_reply.mean_pct << ',' << sc.nc_reply.sd_pct << ','
      << sc.timeline_mean_length << ',' << sc.outlier_fraction;
  }
  return s.str();
}

struct LoadedCorpus {
  Corpus corpus;
  std::vector<RejectedLine> rejects;
  std::optional<synth::GroundTruth> ground_truth;
  Date reference_date;
  std::string bot_oracle_kind;  // "labels" | "model" | "none"
  std::optional<learn::Model> bot_model;
  std::size_t friend_cap_removed = 0;
};

inline LoadedCorpus acquire_corpus(const RunConfig& cfg) {
  LoadedCorpus out;
  if (cfg.synth_defaults) {
    auto sc = cfg.synth;
    sc.seed = cfg.seed;
    if (cfg.reference_date) sc.reference_date = *cfg.reference_date;
    auto [corpus, gt] = synth::generate_corpus(sc);
    out.corpus = std::move(corpus);
    out.ground_truth = std::move(gt);
    out.reference_date = sc.reference_date;
    out.bot_oracle_kind = "labels";
  } else {
    if (cfg.accounts_path.empty()) throw std::runtime_error("missing --accounts");
    auto accounts = load_accounts(cfg.accounts_path);
    out.rejects = accounts.rejects;
    TimelineMap timelines;
    if (!cfg.tweets_path.empty()) {
      auto tweets = load_tweets(cfg.tweets_path);
      out.rejects.insert(out.rejects.end(), tweets.rejects.begin(), tweets.rejects.end());
      timelines = std::move(tweets.value);
    }
    std::unordered_map<std::string, CredLabel> creds;
    if (!cfg.labels_path.empty()) {
      auto typed = type_credulous_labels(load_labels(cfg.labels_path));
      out.rejects.insert(out.rejects.end(), typed.rejects.begin(), typed.rejects.end());
      creds = std::move(typed.labels);
    }
    std::unordered_map<std::string, BotLabel> bots;
    out.bot_oracle_kind = "none";
    if (!cfg.bot_oracle_path.empty()) {
      if (cfg.bot_oracle_path.ends_with(".json")) {
        std::ifstream in(cfg.bot_oracle_path);
        if (!in) throw std::runtime_error("cannot open model: " + cfg.bot_oracle_path);
        nlohmann::json j;
        in >> j;
        out.bot_model = learn::Model::from_json(j);
        out.bot_oracle_kind = "model";
      } else {
        auto typed = type_bot_labels(load_labels(cfg.bot_oracle_path));
        out.rejects.insert(out.rejects.end(), typed.rejects.begin(), typed.rejects.end());
        bots = std::move(typed.labels);
        out.bot_oracle_kind = "labels";
      }
    }
    auto built = build_corpus(std::move(accounts.value), std::move(timelines),
                              std::move(bots), std::move(creds));
    out.rejects.insert(out.rejects.end(), built.rejects.begin(), built.rejects.end());
    out.corpus = std::move(built.corpus);
    if (cfg.reference_date) {
      out.reference_date = *cfg.reference_date;
    } else {
      Date max_date{1970, 1, 1};
      for (const auto& a : out.corpus.accounts) max_date = std::max(max_date, a.created_at);
      out.reference_date = max_date;
    }
  }

  if (cfg.friend_cap) {
    std::vector<AccountRecord> kept;
    for (auto& a : out.corpus.accounts) {
      if (a.friends_count <= *cfg.friend_cap) kept.push_back(std::move(a));
      else out.friend_cap_removed += 1;
    }
    auto relabeled =
        build_corpus(std::move(kept), std::move(out.corpus.timelines),
                     std::move(out.corpus.bot_labels), std::move(out.corpus.credulous_labels));
    out.corpus = std::move(relabeled.corpus);
    // timelines of capped accounts disappear with them
  }
  return out;
}

inline report::ReportWriter make_writer(const RunConfig& cfg, const Date& reference) {
  report::Provenance p;
  p.seed = cfg.seed;
  p.config = canonical_config(cfg, reference);
  p.config_digest = report::digest_hex(p.config);
  return report::ReportWriter(cfg.out_dir, p, cfg.force);
}

inline behavior::BotOracle make_bot_oracle(const LoadedCorpus& loaded, const RunConfig& cfg) {
  if (loaded.bot_model) {
    // classify every corpus account once; origins must live in the corpus
    auto labels = std::make_shared<std::unordered_map<std::string, BotLabel>>();
    FeatureConfig fc{cfg.f15_lo, cfg.f15_hi};
    for (const auto& a : loaded.corpus.accounts) {
      const auto row = extract_class_a(a, loaded.reference_date, fc).to_array();
      (*labels)[a.account_id] =
          loaded.bot_model->predict_label(row) == 1 ? BotLabel::bot : BotLabel::human;
    }
    return [labels](const std::string& id) -> std::optional<BotLabel> {
      auto it = labels->find(id);
      if (it == labels->end()) return std::nullopt;
      return it->second;
    };
  }
  const auto* bot_labels = &loaded.corpus.bot_labels;
  return [bot_labels](const std::string& id) -> std::optional<BotLabel> {
    auto it = bot_labels->find(id);
    if (it == bot_labels->end()) return std::nullopt;
    return it->second;
  };
}

// ---- behavior analysis shared by the behavior and stats subcommands ----

struct ActionAnalysis {
  std::vector<behavior::ByBotMetric> c_metrics;   // all credulous users
  std::vector<behavior::ByBotMetric> nc_metrics;  // all not-credulous users
  behavior::SampleSelection nc_sample;            // indices into nc_metrics
  behavior::SummaryStats c_stats, nc_stats, nc_sample_stats;
  behavior::CoverageCurve coverage;  // C vs the whole NC population
  std::vector<double> c_values, nc_sample_values;  // non-outliers, test inputs
};

struct ActivityRow {
  std::string account_id;
  CredLabel label;
  std::optional<behavior::ActivityRatios> ratios;
};

struct BehaviorAnalysis {
  std::vector<std::string> c_ids, nc_ids;  // corpus order
  ActionAnalysis retweet, reply;
  std::vector<ActivityRow> activity;
};

inline ActionAnalysis analyze_action(const Corpus& corpus, const std::vector<std::string>& c_ids,
                                     const std::vector<std::string>& nc_ids,
                                     behavior::ActionKind action,
                                     const behavior::BotOracle& oracle, std::uint64_t seed) {
  ActionAnalysis a;
  static const std::vector<TweetRecord> kEmpty;
  auto metric_of = [&](const std::string& id) {
    auto it = corpus.timelines.find(id);
    return behavior::bybot_percentage(id, it == corpus.timelines.end() ? kEmpty : it->second,
                                      action, oracle);
  };
  for (const auto& id : c_ids) a.c_metrics.push_back(metric_of(id));
  for (const auto& id : nc_ids) a.nc_metrics.push_back(metric_of(id));
  a.c_stats = behavior::summarize(a.c_metrics);
  a.nc_stats = behavior::summarize(a.nc_metrics);

  const std::uint64_t sample_seed =
      Rng::substream(seed, std::string("sample-") + behavior::action_name(action)).next_u64();
  a.nc_sample = behavior::representative_sample(
      a.nc_metrics, std::min(a.c_metrics.size(), a.nc_metrics.size()), sample_seed);
  a.nc_sample_stats = a.nc_sample.stats;

  for (const auto& m : a.c_metrics)
    if (!m.is_outlier()) a.c_values.push_back(*m.percentage);
  for (auto idx : a.nc_sample.indices)
    if (!a.nc_metrics[idx].is_outlier())
      a.nc_sample_values.push_back(*a.nc_metrics[idx].percentage);

  std::vector<double> nc_all_values;
  for (const auto& m : a.nc_metrics)
    if (!m.is_outlier()) nc_all_values.push_back(*m.percentage);
  if (!a.c_values.empty() && !nc_all_values.empty())
    a.coverage = behavior::coverage_curve(a.c_values, nc_all_values);
  return a;
}

inline BehaviorAnalysis analyze_behavior(const LoadedCorpus& loaded, const RunConfig& cfg) {
  BehaviorAnalysis out;
  const auto& corpus = loaded.corpus;
  for (const auto& acc : corpus.accounts) {
    auto it = corpus.credulous_labels.find(acc.account_id);
    if (it == corpus.credulous_labels.end()) continue;
    (it->second == CredLabel::credulous ? out.c_ids : out.nc_ids).push_back(acc.account_id);
    ActivityRow row;
    row.account_id = acc.account_id;
    row.label = it->second;
    auto tl = corpus.timelines.find(acc.account_id);
    if (tl != corpus.timelines.end()) row.ratios = behavior::activity_ratios(tl->second);
    out.activity.push_back(std::move(row));
  }
  if (out.c_ids.empty() || out.nc_ids.empty())
    throw std::runtime_error("behavior: need credulous labels covering both classes");
  const auto oracle = make_bot_oracle(loaded, cfg);
  out.retweet = analyze_action(corpus, out.c_ids, out.nc_ids, behavior::ActionKind::retweet,
                               oracle, cfg.seed);
  out.reply = analyze_action(corpus, out.c_ids, out.nc_ids, behavior::ActionKind::reply,
                             oracle, cfg.seed);
  return out;
}

// ---- report emission ----

inline nlohmann::ordered_json metrics_json(const learn::Metrics& m) {
  nlohmann::ordered_json j;
  j["accuracy"] = m.accuracy_pct;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  if (m.auc) j["auc"] = *m.auc;
  else j["auc"] = nullptr;
  return j;
}

inline void write_eval_report(const report::ReportWriter& writer, const std::string& stem,
                              const std::string& task, const learn::EvalReport& r) {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["algo"] = r.algo.name();
  j["folds"] = r.fold_metrics.size();
  j["undefined_auc_folds"] = r.undefined_auc_folds;
  auto folds = nlohmann::ordered_json::array();
  for (const auto& m : r.fold_metrics) folds.push_back(metrics_json(m));
  j["fold_metrics"] = std::move(folds);
  j["averaged"] = metrics_json(r.averaged);
  writer.write_json(stem + ".json", std::move(j));

  auto csv = writer.open_csv(stem + ".csv");
  csv << "fold,accuracy,precision,recall,f1,auc\n";
  auto row = [&](const std::string& name, const learn::Metrics& m) {
    csv << name << ',' << report::fmt(m.accuracy_pct, "%.4f") << ','
        << report::fmt(m.precision, "%.4f") << ',' << report::fmt(m.recall, "%.4f") << ','
        << report::fmt(m.f1, "%.4f") << ','
        << (m.auc ? report::fmt(*m.auc, "%.4f") : std::string("undefined")) << '\n';
  };
  for (std::size_t f = 0; f < r.fold_metrics.size(); ++f)
    row(std::to_string(f), r.fold_metrics[f]);
  row("avg", r.averaged);
}

inline void write_test_rows_csv(std::ostream& csv,
                                const std::vector<std::pair<std::string, stats::TestResult>>& rows) {
  csv << "metric,test,statistic,df,df2,p,tail,alpha,passed,n1,n2\n";
  for (const auto& [metric, r] : rows) {
    csv << metric << ',' << r.test << ',' << report::fmt(r.statistic, "%.10g") << ','
        << (r.df ? report::fmt(*r.df, "%.10g") : std::string()) << ','
        << (r.df2 ? report::fmt(*r.df2, "%.10g") : std::string()) << ','
        << report::fmt(r.p_value, "%.10g") << ',' << stats::tail_name(r.tail) << ','
        << report::fmt(r.alpha, "%.10g") << ',' << (r.passed ? "true" : "false") << ','
        << (r.n1 ? std::to_string(*r.n1) : std::string()) << ','
        << (r.n2 ? std::to_string(*r.n2) : std::string()) << '\n';
  }
}

inline nlohmann::ordered_json test_result_json(const std::string& metric,
                                               const stats::TestResult& r) {
  nlohmann::ordered_json j;
  j["metric"] = metric;
  j["test"] = r.test;
  j["statistic_symbol"] = r.statistic_symbol;
  j["statistic"] = r.statistic;
  j["df"] = r.df ? nlohmann::ordered_json(*r.df) : nlohmann::ordered_json(nullptr);
  j["df2"] = r.df2 ? nlohmann::ordered_json(*r.df2) : nlohmann::ordered_json(nullptr);
  j["p"] = r.p_value;
  j["tail"] = stats::tail_name(r.tail);
  j["alpha"] = r.alpha;
  j["passed"] = r.passed;
  if (r.n1) j["n1"] = *r.n1;
  if (r.n2) j["n2"] = *r.n2;
  return j;
}

// ---- subcommands ----

inline int run_synth(const RunConfig& cfg, const LoadedCorpus& loaded) {
  if (!loaded.ground_truth) throw std::runtime_error("synth: no generated corpus");
  auto writer = make_writer(cfg, loaded.reference_date);
  {
    auto out = writer.open("accounts.jsonl");
    for (const auto& a : loaded.corpus.accounts) out << account_to_jsonl(a) << '\n';
  }
  {
    auto out = writer.open("tweets.jsonl");
    for (const auto& a : loaded.corpus.accounts) {
      auto it = loaded.corpus.timelines.find(a.account_id);
      if (it == loaded.corpus.timelines.end()) continue;
      for (const auto& t : it->second) out << tweet_to_jsonl(t) << '\n';
    }
  }
  {
    auto out = writer.open("labels.csv");
    out << "account_id,label\n";
    for (const auto& a : loaded.corpus.accounts) {
      auto it = loaded.corpus.credulous_labels.find(a.account_id);
      if (it != loaded.corpus.credulous_labels.end())
        out << a.account_id << ',' << cred_label_name(it->second) << '\n';
    }
  }
  {
    auto out = writer.open("bot_labels.csv");
    out << "account_id,label\n";
    for (const auto& a : loaded.corpus.accounts) {
      auto it = loaded.corpus.bot_labels.find(a.account_id);
      if (it != loaded.corpus.bot_labels.end())
        out << a.account_id << ',' << bot_label_name(it->second) << '\n';
    }
  }
  writer.write_json("ground_truth.json", synth::ground_truth_to_json(*loaded.ground_truth));
  return 0;
}

inline int run_validate(const RunConfig& cfg, const LoadedCorpus& loaded) {
  auto writer = make_writer(cfg, loaded.reference_date);
  const auto stats = validate_corpus(loaded.corpus);
  nlohmann::ordered_json j;
  j["accounts"] = stats.accounts;
  j["bots"] = stats.bots;
  j["humans"] = stats.humans;
  j["credulous"] = stats.credulous;
  j["not_credulous"] = stats.not_credulous;
  j["dangling_label_ids"] = stats.dangling_label_ids;
  j["dangling_timeline_ids"] = stats.dangling_timeline_ids;
  j["timelines"] = stats.timeline_count;
  j["tweets"] = stats.tweet_count;
  j["timeline_coverage_pct"] = stats.timeline_coverage_pct;
  j["rejected_lines"] = loaded.rejects.size();
  j["friend_cap_removed"] = loaded.friend_cap_removed;
  j["reference_date"] = format_date(loaded.reference_date);
  writer.write_json("corpus_stats.json", std::move(j));

  auto csv = writer.open_csv("rejects.csv");
  csv << "file,line,reason\n";
  for (const auto& r : loaded.rejects)
    csv << r.file << ',' << r.line_no << ",\"" << r.reason << "\"\n";
  return 0;
}

inline int run_features(const RunConfig& cfg, const LoadedCorpus& loaded) {
  auto writer = make_writer(cfg, loaded.reference_date);
  FeatureConfig fc{cfg.f15_lo, cfg.f15_hi};
  auto matrix = extract_matrix(loaded.corpus, loaded.reference_date, fc, cfg.workers);
  matrix.label_names.resize(matrix.account_ids.size());
  for (std::size_t i = 0; i < matrix.account_ids.size(); ++i) {
    auto it = loaded.corpus.credulous_labels.find(matrix.account_ids[i]);
    if (it != loaded.corpus.credulous_labels.end()) {
      matrix.label_names[i] = cred_label_name(it->second);
    } else {
      auto bot = loaded.corpus.bot_labels.find(matrix.account_ids[i]);
      if (bot != loaded.corpus.bot_labels.end())
        matrix.label_names[i] = bot_label_name(bot->second);
    }
  }
  auto csv = writer.open_csv("features.csv");
  write_features_csv(csv, matrix);
  return 0;
}

inline learn::Dataset task_dataset(const LoadedCorpus& loaded, const RunConfig& cfg,
                                   LabelTask task) {
  FeatureConfig fc{cfg.f15_lo, cfg.f15_hi};
  const auto matrix = extract_matrix(loaded.corpus, loaded.reference_date, fc, cfg.workers);
  return learn::to_dataset(labeled_subset(matrix, loaded.corpus, task));
}

inline int run_train(const RunConfig& cfg, const LoadedCorpus& loaded) {
  auto writer = make_writer(cfg, loaded.reference_date);
  const auto data = task_dataset(loaded, cfg, LabelTask::bot);
  if (data.size() == 0) throw std::runtime_error("train: no bot labels in corpus");
  const auto model = learn::train(resolve_algo(cfg), data, cfg.seed, cfg.workers);
  writer.write_json("model.json", model.to_json());
  return 0;
}

inline int run_cv(const RunConfig& cfg, const LoadedCorpus& loaded) {
  auto writer = make_writer(cfg, loaded.reference_date);
  const auto data = task_dataset(loaded, cfg, LabelTask::bot);
  if (data.size() == 0) throw std::runtime_error("cv: no bot labels in corpus");
  const auto report = learn::cross_validate(data, resolve_algo(cfg), cfg.cv_k, cfg.seed,
                                            cfg.workers);
  write_eval_report(writer, "eval_report_bot", "bot", report);
  return 0;
}

inline int run_credulous(const RunConfig& cfg, const LoadedCorpus& loaded) {
  auto writer = make_writer(cfg, loaded.reference_date);
  const auto data = task_dataset(loaded, cfg, LabelTask::credulous);
  if (data.size() == 0) throw std::runtime_error("credulous: no credulous labels in corpus");
  const auto report =
      learn::run_credulous_task(data, resolve_algo(cfg), cfg.seed, cfg.cv_k, cfg.workers);
  write_eval_report(writer, "eval_report", "credulous", report);
  return 0;
}

inline int run_rank(const RunConfig& cfg, const LoadedCorpus& loaded) {
  auto writer = make_writer(cfg, loaded.reference_date);
  const auto data = task_dataset(loaded, cfg, LabelTask::credulous);
  if (data.size() == 0) throw std::runtime_error("rank: no credulous labels in corpus");
  auto csv = writer.open_csv("ranking.csv");
  csv << "evaluator,rank,feature,raw_score,normalized_score\n";
  for (auto ev : {rank::Evaluator::one_r, rank::Evaluator::symmetric_uncertainty,
                  rank::Evaluator::info_gain}) {
    const auto report = rank::rank_features(data, ev, cfg.workers);
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
      const auto& e = report.entries[i];
      csv << rank::evaluator_name(ev) << ',' << i + 1 << ',' << e.feature << ','
          << report::fmt(e.raw_score) << ',' << report::fmt(e.normalized, "%.3f") << '\n';
    }
  }
  return 0;
}

inline void write_behavior_reports(const report::ReportWriter& writer, const RunConfig& cfg,
                                   const BehaviorAnalysis& analysis,
                                   const std::string& oracle_kind) {
  {
    auto csv = writer.open_csv("behavior.csv");
    csv << "account_id,class,action,total,bybot,percentage_or_OUTLIER\n";
    auto rows = [&](const std::vector<behavior::ByBotMetric>& metrics, const char* cls) {
      for (const auto& m : metrics) {
        csv << m.account_id << ',' << cls << ',' << behavior::action_name(m.action) << ','
            << m.total << ',' << m.bybot << ','
            << (m.percentage ? report::fmt(*m.percentage) : std::string("OUTLIER")) << '\n';
      }
    };
    rows(analysis.retweet.c_metrics, "C");
    rows(analysis.retweet.nc_metrics, "NC");
    rows(analysis.reply.c_metrics, "C");
    rows(analysis.reply.nc_metrics, "NC");
  }
  {
    auto csv = writer.open_csv("activity.csv");
    csv << "account_id,class,pure_ratio,retweet_ratio,reply_ratio\n";
    for (const auto& row : analysis.activity) {
      csv << row.account_id << ',' << (row.label == CredLabel::credulous ? "C" : "NC") << ',';
      if (row.ratios) {
        csv << report::fmt(row.ratios->pure_ratio) << ','
            << report::fmt(row.ratios->retweet_ratio) << ','
            << report::fmt(row.ratios->reply_ratio) << '\n';
      } else {
        csv << "UNDEFINED,UNDEFINED,UNDEFINED\n";
      }
    }
  }
  {
    auto csv = writer.open_csv("coverage.csv");
    csv << "action,x,pct_C_ge,pct_NC_lt\n";
    auto rows = [&](const ActionAnalysis& a, const char* action) {
      for (const auto& p : a.coverage.points)
        csv << action << ',' << report::fmt(p.x) << ',' << report::fmt(p.pct_c_ge) << ','
            << report::fmt(p.pct_nc_lt) << '\n';
    };
    rows(analysis.retweet, "retweet");
    rows(analysis.reply, "reply");
  }
  {
    auto csv = writer.open_csv("deciles.csv");
    csv << "action,population,bin,count,percentage\n";
    auto rows = [&](const ActionAnalysis& a, const char* action) {
      const auto c_bins = behavior::decile_groups(a.c_metrics);
      std::vector<behavior::ByBotMetric> sample;
      for (auto idx : a.nc_sample.indices) sample.push_back(a.nc_metrics[idx]);
      const auto s_bins = behavior::decile_groups(sample);
      const auto nc_bins = behavior::decile_groups(a.nc_metrics);
      auto emit = [&](const char* pop, const std::vector<behavior::DecileBin>& bins) {
        for (const auto& b : bins)
          csv << action << ',' << pop << ',' << b.label << ',' << b.count << ','
              << report::fmt(b.percentage) << '\n';
      };
      emit("C", c_bins);
      emit("NC_sample", s_bins);
      emit("NC_all", nc_bins);
    };
    rows(analysis.retweet, "retweet");
    rows(analysis.reply, "reply");
  }
  {
    nlohmann::ordered_json j;
    j["bot_oracle"] = oracle_kind;
    auto stats_json = [](const behavior::SummaryStats& s) {
      return nlohmann::ordered_json{
          {"mean", s.mean}, {"sd", s.sd}, {"n", s.n}, {"n_outliers", s.n_outliers}};
    };
    auto action_json = [&](const ActionAnalysis& a) {
      nlohmann::ordered_json aj;
      aj["C"] = stats_json(a.c_stats);
      aj["NC_all"] = stats_json(a.nc_stats);
      aj["NC_sample"] = stats_json(a.nc_sample_stats);
      aj["sample_distance"] = a.nc_sample.distance;
      aj["sample_candidate"] = a.nc_sample.candidate;
      if (!a.coverage.points.empty())
        aj["max_coverage"] = {{"x", a.coverage.max_point.x},
                              {"pct_C_ge", a.coverage.max_point.pct_c_ge},
                              {"pct_NC_lt", a.coverage.max_point.pct_nc_lt}};
      return aj;
    };
    j["retweet"] = action_json(analysis.retweet);
    j["reply"] = action_json(analysis.reply);

    // activity-ratio population means, mirroring the per-class stats table
    auto ratio_stats = [&](bool credulous) {
      double sums[3] = {0, 0, 0};
      double sq[3] = {0, 0, 0};
      std::size_t n = 0;
      for (const auto& row : analysis.activity) {
        if ((row.label == CredLabel::credulous) != credulous || !row.ratios) continue;
        const double vals[3] = {row.ratios->pure_ratio, row.ratios->retweet_ratio,
                                row.ratios->reply_ratio};
        for (int k = 0; k < 3; ++k) {
          sums[k] += vals[k];
          sq[k] += vals[k] * vals[k];
        }
        ++n;
      }
      nlohmann::ordered_json out;
      const char* names[3] = {"pure", "retweet", "reply"};
      for (int k = 0; k < 3; ++k) {
        const double mean = n ? sums[k] / static_cast<double>(n) : 0.0;
        const double var = n ? std::max(0.0, sq[k] / static_cast<double>(n) - mean * mean) : 0.0;
        out[names[k]] = {{"mean", mean}, {"sd", std::sqrt(var)}};
      }
      out["n"] = n;
      return out;
    };
    j["activity"] = {{"C", ratio_stats(true)}, {"NC", ratio_stats(false)}};
    writer.write_json("behavior_summary.json", std::move(j));
  }

  if (cfg.plots) {
    auto scatter = [&](const ActionAnalysis& a, const std::string& name) {
      std::vector<plots::ScatterSeries> series(2);
      series[0] = {"C", "purple", {}};
      series[1] = {"NC sample", "green", {}};
      for (const auto& m : a.c_metrics)
        series[0].values.push_back(
            m.percentage ? *m.percentage : std::numeric_limits<double>::quiet_NaN());
      for (auto idx : a.nc_sample.indices) {
        const auto& m = a.nc_metrics[idx];
        series[1].values.push_back(
            m.percentage ? *m.percentage : std::numeric_limits<double>::quiet_NaN());
      }
      auto out = writer.open("scatter_" + name + ".svg");
      plots::scatter_plot(out, "byBot-" + name + " percentage per user", series);
    };
    auto coverage = [&](const ActionAnalysis& a, const std::string& name) {
      std::vector<plots::CurvePoint> c_pts, nc_pts;
      double max_x = 0.0;
      for (const auto& p : a.coverage.points) {
        c_pts.push_back({p.x, p.pct_c_ge});
        nc_pts.push_back({p.x, p.pct_nc_lt});
        max_x = std::max(max_x, p.x);
      }
      auto out = writer.open("coverage_" + name + ".svg");
      plots::coverage_plot(out, "population coverage, byBot-" + name, c_pts, nc_pts, max_x);
    };
    auto bars = [&](const ActionAnalysis& a, const std::string& name) {
      const auto c_bins = behavior::decile_groups(a.c_metrics);
      std::vector<behavior::ByBotMetric> sample;
      for (auto idx : a.nc_sample.indices) sample.push_back(a.nc_metrics[idx]);
      const auto s_bins = behavior::decile_groups(sample);
      std::vector<plots::BarGroup> groups;
      for (std::size_t b = 0; b < c_bins.size(); ++b)
        groups.push_back({c_bins[b].label, static_cast<double>(c_bins[b].count),
                          static_cast<double>(s_bins[b].count)});
      auto out = writer.open("deciles_" + name + ".svg");
      plots::decile_bars(out, "byBot-" + name + " deciles", "C", "NC sample", groups);
    };
    scatter(analysis.retweet, "retweet");
    coverage(analysis.retweet, "retweet");
    bars(analysis.retweet, "retweet");
    scatter(analysis.reply, "reply");
    coverage(analysis.reply, "reply");
    bars(analysis.reply, "reply");
  }
}

inline int run_behavior(const RunConfig& cfg, const LoadedCorpus& loaded) {
  auto writer = make_writer(cfg, loaded.reference_date);
  const auto analysis = analyze_behavior(loaded, cfg);
  write_behavior_reports(writer, cfg, analysis, loaded.bot_oracle_kind);
  return 0;
}

// The hypothesis-test battery over behavior metrics and the three
// count-valued features, mirroring the normality / parametric /
// non-parametric table structure.
inline std::vector<std::pair<std::string, stats::TestResult>> stats_battery(
    const LoadedCorpus& loaded, const RunConfig& cfg, const BehaviorAnalysis& analysis) {
  std::vector<std::pair<std::string, stats::TestResult>> rows;
  auto battery = [&](const std::string& metric, const std::vector<double>& c,
                     const std::vector<double>& nc) {
    rows.emplace_back(metric + "_C",
                      stats::ks_normality(c, cfg.alpha, cfg.seed, cfg.lilliefors_replicates,
                                          cfg.workers));
    rows.emplace_back(metric + "_NC",
                      stats::ks_normality(nc, cfg.alpha, cfg.seed, cfg.lilliefors_replicates,
                                          cfg.workers));
    rows.emplace_back(metric,
                      stats::t_test(c, nc, stats::TTestMode::pooled_independent, cfg.alpha));
    rows.emplace_back(metric, stats::anova_oneway({c, nc}, cfg.alpha));
    rows.emplace_back(metric, stats::mann_whitney(c, nc, cfg.alpha, cfg.mw_tail));
    rows.emplace_back(metric, stats::kruskal_wallis({c, nc}, cfg.alpha));
  };
  battery("bybot_retweet_pct", analysis.retweet.c_values, analysis.retweet.nc_sample_values);
  battery("bybot_reply_pct", analysis.reply.c_values, analysis.reply.nc_sample_values);

  // feature battery over C vs a plain random NC subset of equal size
  FeatureConfig fc{cfg.f15_lo, cfg.f15_hi};
  const auto matrix = extract_matrix(loaded.corpus, loaded.reference_date, fc, cfg.workers);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < matrix.account_ids.size(); ++i)
    row_of[matrix.account_ids[i]] = i;
  Rng rng = Rng::substream(cfg.seed, "feature-battery-sample");
  auto nc_pick = rng.sample_without_replacement(
      analysis.nc_ids.size(), std::min(analysis.c_ids.size(), analysis.nc_ids.size()));
  for (const char* fid : {"F3", "F5", "F19"}) {
    const int col = feature_column(fid);
    std::vector<double> c_vals, nc_vals;
    for (const auto& id : analysis.c_ids) c_vals.push_back(matrix.rows[row_of.at(id)][col]);
    for (auto idx : nc_pick)
      nc_vals.push_back(matrix.rows[row_of.at(analysis.nc_ids[idx])][col]);
    const auto mode = cfg.t_mode == "pooled" ? stats::TTestMode::pooled_independent
                                             : stats::TTestMode::paired;
    if (mode == stats::TTestMode::paired && c_vals.size() != nc_vals.size()) {
      // unequal classes cannot pair; surfaced rather than silently switched
      throw std::runtime_error("stats: paired t-test needs equal class sizes; "
                               "use --t-mode pooled");
    }
    rows.emplace_back(fid, stats::t_test(c_vals, nc_vals, mode, cfg.alpha));
    stats::TestResult pcc;
    pcc.test = "pearson";
    pcc.statistic_symbol = "r";
    pcc.statistic = stats::pearson(c_vals, nc_vals);
    pcc.p_value = std::numeric_limits<double>::quiet_NaN();
    pcc.alpha = cfg.alpha;
    pcc.n1 = c_vals.size();
    pcc.n2 = nc_vals.size();
    rows.emplace_back(fid, pcc);
  }
  return rows;
}

inline void write_tests_reports(const report::ReportWriter& writer,
                                const std::vector<std::pair<std::string, stats::TestResult>>& rows) {
  auto array = nlohmann::ordered_json::array();
  for (const auto& [metric, r] : rows) array.push_back(test_result_json(metric, r));
  nlohmann::ordered_json j;
  j["tests"] = std::move(array);
  writer.write_json("tests.json", std::move(j));
  auto csv = writer.open_csv("tests.csv");
  write_test_rows_csv(csv, rows);
}

inline std::vector<double> load_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open value file: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(std::stod(line));
  }
  return values;
}

inline int run_stats(const RunConfig& cfg, const LoadedCorpus* loaded) {
  if (!cfg.x_path.empty() || !cfg.y_path.empty()) {
    if (cfg.x_path.empty() || cfg.y_path.empty())
      throw std::runtime_error("stats: value-file mode needs both --x and --y");
    const auto x = load_value_file(cfg.x_path);
    const auto y = load_value_file(cfg.y_path);
    const Date ref = cfg.reference_date.value_or(Date{1970, 1, 1});
    auto writer = make_writer(cfg, ref);
    std::vector<std::pair<std::string, stats::TestResult>> rows;
    rows.emplace_back("x", stats::ks_normality(x, cfg.alpha, cfg.seed,
                                               cfg.lilliefors_replicates, cfg.workers));
    rows.emplace_back("y", stats::ks_normality(y, cfg.alpha, cfg.seed,
                                               cfg.lilliefors_replicates, cfg.workers));
    const auto mode = cfg.t_mode == "paired" && x.size() == y.size()
                          ? stats::TTestMode::paired
                          : stats::TTestMode::pooled_independent;
    rows.emplace_back("xy", stats::t_test(x, y, mode, cfg.alpha));
    rows.emplace_back("xy", stats::anova_oneway({x, y}, cfg.alpha));
    rows.emplace_back("xy", stats::mann_whitney(x, y, cfg.alpha, cfg.mw_tail));
    rows.emplace_back("xy", stats::kruskal_wallis({x, y}, cfg.alpha));
    write_tests_reports(writer, rows);
    return 0;
  }
  if (!loaded) throw std::runtime_error("stats: need a corpus or --x/--y value files");
  auto writer = make_writer(cfg, loaded->reference_date);
  const auto analysis = analyze_behavior(*loaded, cfg);
  write_tests_reports(writer, stats_battery(*loaded, cfg, analysis));
  return 0;
}

inline int run_pipeline(const RunConfig& cfg, const LoadedCorpus& loaded) {
  if (cfg.synth_defaults) run_synth(cfg, loaded);
  run_validate(cfg, loaded);
  run_features(cfg, loaded);
  if (!loaded.corpus.bot_labels.empty()) run_cv(cfg, loaded);
  run_credulous(cfg, loaded);
  run_rank(cfg, loaded);
  auto writer = make_writer(cfg, loaded.reference_date);
  const auto analysis = analyze_behavior(loaded, cfg);
  write_behavior_reports(writer, cfg, analysis, loaded.bot_oracle_kind);
  write_tests_reports(writer, stats_battery(loaded, cfg, analysis));
  return 0;
}

}  // namespace credulens::app
