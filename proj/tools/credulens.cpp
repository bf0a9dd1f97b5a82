#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "credulens/app.hpp"
#include "credulens/version.hpp"

// credulens: batch analytics over social-profile corpora. Detects credulous
// users (humans following many bots) with profile-only features, ranks the
// features, and quantifies how much bot-originated content they amplify.

namespace {

using credulens::app::RunConfig;

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& reference,
                      std::string& f15_band, std::string& tail) {
  cmd->add_option("--accounts", cfg.accounts_path, "accounts.jsonl path");
  cmd->add_option("--tweets", cfg.tweets_path, "tweets.jsonl path");
  cmd->add_option("--labels", cfg.labels_path, "credulous labels.csv path");
  cmd->add_option("--bot-oracle", cfg.bot_oracle_path,
                  "bot labels.csv, or a trained model.json");
  cmd->add_flag("--synth-defaults", cfg.synth_defaults,
                "generate the default synthetic corpus instead of loading files");
  cmd->add_option("--algo", cfg.algo, "zero_r|one_r|knn|tree|forest")
      ->default_val("forest");
  cmd->add_option("--k", cfg.cv_k, "cross-validation fold count")->default_val(10);
  cmd->add_option("--knn-k", cfg.knn_k, "neighbors for knn")->default_val(3);
  cmd->add_option("--trees", cfg.trees, "forest size")->default_val(100);
  cmd->add_option("--max-depth", cfg.max_depth, "tree depth cap, 0 = unlimited")
      ->default_val(0);
  cmd->add_option("--min-leaf", cfg.min_leaf, "minimum rows per tree leaf")->default_val(1);
  cmd->add_option("--mtry", cfg.mtry, "features per forest split, 0 = ceil(sqrt(d))")
      ->default_val(0);
  cmd->add_option("--seed", cfg.seed, "run seed (CREDULENS_SEED is the fallback)");
  cmd->add_option("--alpha", cfg.alpha, "significance level")->default_val(0.05);
  cmd->add_option("--tail", tail, "mann-whitney tail: one|two")->default_val("one");
  cmd->add_option("--t-mode", cfg.t_mode, "feature t-test mode: paired|pooled")
      ->default_val("paired");
  cmd->add_option("--reference-date", reference, "feature reference date, YYYY-MM-DD");
  cmd->add_option("--f15-band", f15_band, "friends-per-follower band LO:HI")
      ->default_val("50:150");
  cmd->add_option("--friend-cap", cfg.friend_cap,
                  "drop accounts with more friends than this");
  cmd->add_option("--lilliefors-replicates", cfg.lilliefors_replicates,
                  "monte-carlo replicates for the normality test")
      ->default_val(20000);
  cmd->add_option("--workers", cfg.workers, "worker threads")->default_val(1);
  cmd->add_option("--out", cfg.out_dir, "output directory")->default_val(".");
  cmd->add_flag("--plots", cfg.plots, "emit svg plots");
  cmd->add_flag("--force", cfg.force, "overwrite existing report files");
}

void add_synth_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n-credulous", cfg.synth.n_credulous)->default_val(316);
  cmd->add_option("--n-not-credulous", cfg.synth.n_not_credulous)->default_val(316);
  cmd->add_option("--n-bots", cfg.synth.n_bots)->default_val(100);
  cmd->add_option("--f3-shift", cfg.synth.f3_shift)->default_val(1.0);
  cmd->add_option("--f5-shift", cfg.synth.f5_shift)->default_val(1.0);
  cmd->add_option("--f19-shift", cfg.synth.f19_shift)->default_val(1.0);
  cmd->add_option("--timeline-length", cfg.synth.timeline_mean_length)->default_val(50.0);
  cmd->add_option("--outlier-fraction", cfg.synth.outlier_fraction)->default_val(0.03);
  cmd->add_option("--bybot-c-retweet", cfg.synth.c_retweet.mean_pct)->default_val(16.45);
  cmd->add_option("--bybot-nc-retweet", cfg.synth.nc_retweet.mean_pct)->default_val(13.21);
  cmd->add_option("--bybot-c-reply", cfg.synth.c_reply.mean_pct)->default_val(13.77);
  cmd->add_option("--bybot-nc-reply", cfg.synth.nc_reply.mean_pct)->default_val(10.81);
}

int fail(const std::string& subcommand, const std::exception& e) {
  nlohmann::ordered_json j;
  j["tool"] = credulens::kToolName;
  j["version"] = credulens::kToolVersion;
  j["subcommand"] = subcommand;
  j["error"] = e.what();
  std::cerr << j.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"credulous-user analytics pipeline"};
  cli.set_version_flag("--version",
                       std::string(credulens::kToolName) + " " + credulens::kToolVersion);
  cli.require_subcommand(1);

  RunConfig cfg;
  if (const char* env_seed = std::getenv("CREDULENS_SEED"))
    cfg.seed = std::strtoull(env_seed, nullptr, 10);
  std::string reference, f15_band = "50:150", tail = "one";

  auto* synth_cmd = cli.add_subcommand("synth", "generate a synthetic labeled corpus");
  auto* validate_cmd = cli.add_subcommand("validate", "load and validate a corpus");
  auto* features_cmd = cli.add_subcommand("features", "export the feature matrix");
  auto* train_cmd = cli.add_subcommand("train", "train a bot-detection model");
  auto* cv_cmd = cli.add_subcommand("cv", "cross-validate the bot-detection task");
  auto* credulous_cmd =
      cli.add_subcommand("credulous", "balanced-fold credulous-detection task");
  auto* rank_cmd = cli.add_subcommand("rank", "rank features by the three evaluators");
  auto* behavior_cmd = cli.add_subcommand("behavior", "bot-amplification analytics");
  auto* stats_cmd = cli.add_subcommand("stats", "hypothesis-test battery");
  auto* pipeline_cmd = cli.add_subcommand("pipeline", "run everything in order");

  for (auto* cmd : {synth_cmd, validate_cmd, features_cmd, train_cmd, cv_cmd, credulous_cmd,
                    rank_cmd, behavior_cmd, stats_cmd, pipeline_cmd}) {
    add_common_flags(cmd, cfg, reference, f15_band, tail);
    add_synth_flags(cmd, cfg);
  }
  stats_cmd->add_option("--x", cfg.x_path, "value file, one number per line");
  stats_cmd->add_option("--y", cfg.y_path, "value file, one number per line");

  CLI11_PARSE(cli, argc, argv);

  const std::string sub = cli.get_subcommands().front()->get_name();
  try {
    if (!reference.empty()) {
      const auto parsed = credulens::parse_date(reference);
      if (!parsed) throw std::runtime_error("bad --reference-date: " + reference);
      cfg.reference_date = parsed;
    }
    const auto colon = f15_band.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("bad --f15-band, expected LO:HI");
    cfg.f15_lo = std::stod(f15_band.substr(0, colon));
    cfg.f15_hi = std::stod(f15_band.substr(colon + 1));
    if (tail == "one") cfg.mw_tail = credulens::stats::Tail::one;
    else if (tail == "two") cfg.mw_tail = credulens::stats::Tail::two;
    else throw std::runtime_error("bad --tail: " + tail);
    if (cfg.t_mode != "paired" && cfg.t_mode != "pooled")
      throw std::runtime_error("bad --t-mode: " + cfg.t_mode);

    // the synth subcommand implies generation even without the flag
    if (sub == "synth") cfg.synth_defaults = true;

    if (sub == "stats" && !cfg.x_path.empty())
      return credulens::app::run_stats(cfg, nullptr);

    const auto loaded = credulens::app::acquire_corpus(cfg);
    if (sub == "synth") return credulens::app::run_synth(cfg, loaded);
    if (sub == "validate") return credulens::app::run_validate(cfg, loaded);
    if (sub == "features") return credulens::app::run_features(cfg, loaded);
    if (sub == "train") return credulens::app::run_train(cfg, loaded);
    if (sub == "cv") return credulens::app::run_cv(cfg, loaded);
    if (sub == "credulous") return credulens::app::run_credulous(cfg, loaded);
    if (sub == "rank") return credulens::app::run_rank(cfg, loaded);
    if (sub == "behavior") return credulens::app::run_behavior(cfg, loaded);
    if (sub == "stats") return credulens::app::run_stats(cfg, &loaded);
    if (sub == "pipeline") return credulens::app::run_pipeline(cfg, loaded);
    throw std::runtime_error("unknown subcommand: " + sub);
  } catch (const std::exception& e) {
    return fail(sub, e);
  }
}
