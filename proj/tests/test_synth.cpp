#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "credulens/behavior.hpp"
#include "credulens/features.hpp"
#include "credulens/ingest.hpp"
#include "credulens/stats/tests.hpp"
#include "credulens/synth.hpp"

using namespace credulens;
using namespace credulens::synth;
using Catch::Approx;

namespace {

std::string serialize(const Corpus& corpus) {
  std::string out;
  for (const auto& a : corpus.accounts) out += account_to_jsonl(a) + "\n";
  for (const auto& a : corpus.accounts) {
    auto it = corpus.timelines.find(a.account_id);
    if (it == corpus.timelines.end()) continue;
    for (const auto& t : it->second) out += tweet_to_jsonl(t) + "\n";
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> bybot_values(
    const Corpus& corpus, behavior::ActionKind action) {
  behavior::BotOracle oracle = [&](const std::string& id) -> std::optional<BotLabel> {
    auto it = corpus.bot_labels.find(id);
    if (it == corpus.bot_labels.end()) return std::nullopt;
    return it->second;
  };
  std::vector<double> c, nc;
  for (const auto& [id, label] : corpus.credulous_labels) {
    auto tl = corpus.timelines.find(id);
    if (tl == corpus.timelines.end()) continue;
    auto m = behavior::bybot_percentage(id, tl->second, action, oracle);
    if (m.is_outlier()) continue;
    (label == CredLabel::credulous ? c : nc).push_back(*m.percentage);
  }
  return {c, nc};
}

}  // namespace

TEST_CASE("generation is byte-identical per seed") {
  SynthConfig config;
  config.n_credulous = 40;
  config.n_not_credulous = 40;
  config.n_bots = 15;
  config.seed = 7;
  auto [c1, g1] = generate_corpus(config);
  auto [c2, g2] = generate_corpus(config);
  CHECK(serialize(c1) == serialize(c2));
  CHECK(ground_truth_to_json(g1).dump() == ground_truth_to_json(g2).dump());

  config.seed = 8;
  auto [c3, g3] = generate_corpus(config);
  CHECK(serialize(c1) != serialize(c3));
}

TEST_CASE("generated corpus passes ingest validation with zero rejects") {
  SynthConfig config;
  config.n_credulous = 30;
  config.n_not_credulous = 60;
  config.n_bots = 10;
  config.seed = 3;
  auto [corpus, gt] = generate_corpus(config);

  auto dir = std::filesystem::temp_directory_path() /
             ("credulens_synth_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  write_accounts_jsonl(dir / "accounts.jsonl", corpus.accounts);
  write_tweets_jsonl(dir / "tweets.jsonl", corpus);
  write_labels_csv(dir / "bots.csv", corpus, corpus.bot_labels, bot_label_name);
  write_labels_csv(dir / "creds.csv", corpus, corpus.credulous_labels, cred_label_name);

  auto accounts = load_accounts(dir / "accounts.jsonl");
  auto tweets = load_tweets(dir / "tweets.jsonl");
  auto bots = type_bot_labels(load_labels(dir / "bots.csv"));
  auto creds = type_credulous_labels(load_labels(dir / "creds.csv"));
  CHECK(accounts.rejects.empty());
  CHECK(tweets.rejects.empty());
  CHECK(bots.rejects.empty());
  CHECK(creds.rejects.empty());

  auto built = build_corpus(accounts.value, tweets.value, bots.labels, creds.labels);
  CHECK(built.rejects.empty());
  auto stats = validate_corpus(built.corpus);
  CHECK(stats.accounts == 100);
  CHECK(stats.bots == 10);
  CHECK(stats.humans == 90);
  CHECK(stats.credulous == 30);
  CHECK(stats.not_credulous == 60);
  CHECK(stats.dangling_label_ids.empty());

  // every origin author resolves within the corpus
  for (const auto& [id, timeline] : built.corpus.timelines)
    for (const auto& t : timeline)
      if (t.origin_author_id)
        CHECK(built.corpus.account_index.count(*t.origin_author_id) == 1);

  std::filesystem::remove_all(dir);
}

TEST_CASE("feature extraction works on generated accounts") {
  SynthConfig config;
  config.n_credulous = 25;
  config.n_not_credulous = 25;
  config.n_bots = 5;
  config.seed = 11;
  auto [corpus, gt] = generate_corpus(config);
  auto m = extract_matrix(corpus, config.reference_date);
  CHECK(m.rows.size() == 55);
}

TEST_CASE("empirical bybot mean tracks the configured mean") {
  SynthConfig config;  // defaults: C 16.45, NC 13.21, n = 316/316
  config.seed = 21;
  auto [corpus, gt] = generate_corpus(config);
  auto [c, nc] = bybot_values(corpus, behavior::ActionKind::retweet);
  REQUIRE(c.size() > 280);
  REQUIRE(nc.size() > 280);
  const double c_mean = std::accumulate(c.begin(), c.end(), 0.0) / c.size();
  const double nc_mean = std::accumulate(nc.begin(), nc.end(), 0.0) / nc.size();
  CHECK(c_mean == Approx(16.45).margin(1.5));
  CHECK(nc_mean == Approx(13.21).margin(1.5));
}

TEST_CASE("zero outlier fraction yields no empty action lists") {
  SynthConfig config;
  config.n_credulous = 100;
  config.n_not_credulous = 100;
  config.n_bots = 10;
  config.outlier_fraction = 0.0;
  config.seed = 5;
  auto [corpus, gt] = generate_corpus(config);
  for (const auto& [id, timeline] : corpus.timelines) {
    std::size_t rt = 0, rp = 0;
    for (const auto& t : timeline) {
      const auto cat = behavior::classify_tweet_type(t);
      rt += cat == behavior::TweetCategory::retweet;
      rp += cat == behavior::TweetCategory::reply;
    }
    REQUIRE(rt > 0);
    REQUIRE(rp > 0);
  }
}

TEST_CASE("outlier fraction produces ground-truth-flagged outliers") {
  SynthConfig config;
  config.n_credulous = 150;
  config.n_not_credulous = 150;
  config.n_bots = 10;
  config.outlier_fraction = 0.2;
  config.seed = 13;
  auto [corpus, gt] = generate_corpus(config);
  std::size_t flagged = 0, empty = 0;
  for (const auto& u : gt.users) {
    if (u.cls == "bot") continue;
    std::size_t rt = 0;
    for (const auto& t : corpus.timelines.at(u.account_id))
      rt += behavior::classify_tweet_type(t) == behavior::TweetCategory::retweet;
    if (u.outlier_retweet) {
      ++flagged;
      CHECK(rt == 0);
    } else {
      CHECK(rt > 0);
    }
    empty += rt == 0;
  }
  CHECK(flagged == empty);
  CHECK(flagged > 30);  // ~20% of 300
}

TEST_CASE("beta fit reproduces the requested moments") {
  for (auto [m, s] : {std::pair{0.1645, 0.1184}, {0.1321, 0.121}, {0.5, 0.2}}) {
    auto p = beta_by_moments(m, s);
    const double mean = p.a / (p.a + p.b);
    const double var = p.a * p.b / ((p.a + p.b) * (p.a + p.b) * (p.a + p.b + 1.0));
    CHECK(mean == Approx(m).margin(1e-9));
    CHECK(std::sqrt(var) == Approx(s).margin(1e-9));
  }
  // sd beyond the bernoulli limit is clamped but still yields a valid draw
  auto p = beta_by_moments(0.05, 0.9);
  CHECK(p.a > 0.0);
  CHECK(p.b > 0.0);
}

TEST_CASE("type-I calibration: no separation means few rejections") {
  int rejections = 0;
  const int runs = 40;
  for (int s = 0; s < runs; ++s) {
    SynthConfig config;
    config.n_credulous = 120;
    config.n_not_credulous = 120;
    config.n_bots = 20;
    config.timeline_mean_length = 30.0;
    config.nc_retweet = config.c_retweet;  // zero separation
    config.nc_reply = config.c_reply;
    config.seed = 1000 + static_cast<std::uint64_t>(s);
    auto [corpus, gt] = generate_corpus(config);
    auto [c, nc] = bybot_values(corpus, behavior::ActionKind::retweet);
    rejections += stats::mann_whitney(c, nc, 0.05).passed;
  }
  CHECK(rejections <= 7);  // generous bound on a 5% nominal rate over 40 runs
}

TEST_CASE("power: the default separation is detected most of the time") {
  int rejections = 0;
  const int runs = 25;
  for (int s = 0; s < runs; ++s) {
    SynthConfig config;  // defaults carry the planted 16.45 vs 13.21 gap
    config.timeline_mean_length = 30.0;
    config.seed = 2000 + static_cast<std::uint64_t>(s);
    auto [corpus, gt] = generate_corpus(config);
    auto [c, nc] = bybot_values(corpus, behavior::ActionKind::retweet);
    rejections += stats::mann_whitney(c, nc, 0.05).passed;
  }
  CHECK(rejections >= 20);  // >= 80%
}
