#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "credulens/ingest.hpp"
#include "credulens/records.hpp"
#include "credulens/rng.hpp"

// Synthetic labeled corpora with a configurable planted signal, so the whole
// pipeline can be exercised and calibrated at desk scale. All draws come
// from substreams named per account, so adding a knob never perturbs
// unrelated accounts and generation order is irrelevant.

namespace credulens::synth {

struct RateSpec {
  double mean_pct = 0.0;  // in [0,100]
  double sd_pct = 0.0;
};

struct SynthConfig {
  std::size_t n_credulous = 316;
  std::size_t n_not_credulous = 316;
  std::size_t n_bots = 100;

  // Multiplicative median shifts applied to the credulous class's tweet,
  // friend and follower counts. 1.0 plants no feature signal.
  double f3_shift = 1.0;
  double f5_shift = 1.0;
  double f19_shift = 1.0;

  // Per-class rates of bot-originated reactions. Defaults echo the observed
  // populations: retweets 16.45 vs 13.21, replies 13.77 vs 10.81.
  RateSpec c_retweet{16.45, 11.84};
  RateSpec nc_retweet{13.21, 12.10};
  RateSpec c_reply{13.77, 15.10};
  RateSpec nc_reply{10.81, 14.03};

  double timeline_mean_length = 50.0;
  double outlier_fraction = 0.03;  // chance a user never does a given action
  Date reference_date{2020, 12, 31};
  std::uint64_t seed = 1;
};

struct UserTruth {
  std::string account_id;
  std::string cls;  // credulous | not_credulous | bot
  double retweet_bybot_rate = 0.0;  // percent
  double reply_bybot_rate = 0.0;
  bool outlier_retweet = false;
  bool outlier_reply = false;
};

struct GroundTruth {
  SynthConfig config;
  std::vector<UserTruth> users;
};

// Beta parameters matched to (mean, sd) on [0,1]; an sd at or beyond the
// bernoulli limit is pulled just inside it.
struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

inline BetaParams beta_by_moments(double mean01, double sd01) {
  const double m = std::clamp(mean01, 1e-4, 1.0 - 1e-4);
  const double cap = 0.98 * m * (1.0 - m);
  const double var = std::min(sd01 * sd01, cap);
  const double nu = m * (1.0 - m) / std::max(var, 1e-12) - 1.0;
  return {std::max(m * nu, 1e-3), std::max((1.0 - m) * nu, 1e-3)};
}

namespace detail {

// Profile shape constants per population. Counts are log-normal (heavy
// tails, like the real platform); booleans are bernoulli.
struct ProfileShape {
  double friends_median, friends_sigma;
  double followers_median, followers_sigma;
  double statuses_median, statuses_sigma;
  double listed_mean;
  double p_name, p_bio, p_url, p_location, p_image, p_default_image, p_bot_bio;
};

inline constexpr ProfileShape kHumanShape{150.0, 0.9, 200.0, 1.1, 800.0, 1.2, 1.2,
                                          0.99, 0.85, 0.35, 0.55, 0.98, 0.03, 0.002};
inline constexpr ProfileShape kBotShape{900.0, 0.9, 40.0, 1.0, 2500.0, 1.4, 0.3,
                                        0.95, 0.45, 0.20, 0.15, 0.80, 0.40, 0.08};

// Mean activity mixes (pure, retweet+quote, reply), echoing the observed
// per-class tweeting ratios; per-user mixes are dirichlet around them.
inline constexpr double kMixCredulous[3] = {0.566, 0.293, 0.141};
inline constexpr double kMixNotCredulous[3] = {0.474, 0.330, 0.196};
inline constexpr double kMixConcentration = 4.0;
inline constexpr double kQuoteShare = 0.2;  // of retweets

inline AccountRecord draw_account(const std::string& id, const ProfileShape& shape,
                                  double f3_shift, double f5_shift, double f19_shift,
                                  const Date& reference, Rng& rng) {
  AccountRecord a;
  a.account_id = id;
  a.friends_count =
      static_cast<std::int64_t>(rng.lognormal(std::log(shape.friends_median * f5_shift),
                                              shape.friends_sigma));
  a.followers_count =
      static_cast<std::int64_t>(rng.lognormal(std::log(shape.followers_median * f19_shift),
                                              shape.followers_sigma));
  a.statuses_count =
      static_cast<std::int64_t>(rng.lognormal(std::log(shape.statuses_median * f3_shift),
                                              shape.statuses_sigma));
  a.listed_count = static_cast<std::int64_t>(rng.poisson(shape.listed_mean));
  const std::int64_t age_days = 200 + static_cast<std::int64_t>(rng.uniform_int(2800));
  a.created_at = date_from_days(days_since_epoch(reference) - age_days);
  a.has_name = rng.bernoulli(shape.p_name);
  a.has_bio = rng.bernoulli(shape.p_bio);
  if (a.has_bio)
    a.bio_text = rng.bernoulli(shape.p_bot_bio) ? "just a friendly bot account"
                                                : "posting about life and news";
  a.has_url = rng.bernoulli(shape.p_url);
  a.has_location = rng.bernoulli(shape.p_location);
  a.has_profile_image = rng.bernoulli(shape.p_image);
  a.default_image_after_2m = rng.bernoulli(shape.p_default_image);
  return a;
}

}  // namespace detail

inline std::pair<Corpus, GroundTruth> generate_corpus(const SynthConfig& config) {
  const std::size_t n_humans = config.n_credulous + config.n_not_credulous;
  const std::size_t n_total = n_humans + config.n_bots;

  std::vector<AccountRecord> accounts(n_total);
  std::vector<UserTruth> truths(n_total);
  TimelineMap timelines;
  std::unordered_map<std::string, BotLabel> bot_labels;
  std::unordered_map<std::string, CredLabel> cred_labels;

  auto account_id = [&](std::size_t i) {
    char buf[32];
    if (i < config.n_credulous) std::snprintf(buf, sizeof buf, "C%06zu", i);
    else if (i < n_humans) std::snprintf(buf, sizeof buf, "N%06zu", i - config.n_credulous);
    else std::snprintf(buf, sizeof buf, "B%06zu", i - n_humans);
    return std::string(buf);
  };

  const auto c_rt = beta_by_moments(config.c_retweet.mean_pct / 100.0,
                                    config.c_retweet.sd_pct / 100.0);
  const auto nc_rt = beta_by_moments(config.nc_retweet.mean_pct / 100.0,
                                     config.nc_retweet.sd_pct / 100.0);
  const auto c_rp = beta_by_moments(config.c_reply.mean_pct / 100.0,
                                    config.c_reply.sd_pct / 100.0);
  const auto nc_rp = beta_by_moments(config.nc_reply.mean_pct / 100.0,
                                     config.nc_reply.sd_pct / 100.0);

  for (std::size_t i = 0; i < n_total; ++i) {
    const bool is_bot = i >= n_humans;
    const bool is_credulous = i < config.n_credulous;
    const std::string id = account_id(i);

    Rng rng = Rng::substream(config.seed, "account", i);
    accounts[i] = detail::draw_account(
        id, is_bot ? detail::kBotShape : detail::kHumanShape,
        is_credulous ? config.f3_shift : 1.0, is_credulous ? config.f5_shift : 1.0,
        is_credulous ? config.f19_shift : 1.0, config.reference_date, rng);

    UserTruth& truth = truths[i];
    truth.account_id = id;
    bot_labels[id] = is_bot ? BotLabel::bot : BotLabel::human;
    if (is_bot) {
      truth.cls = "bot";
      continue;
    }
    cred_labels[id] = is_credulous ? CredLabel::credulous : CredLabel::not_credulous;
    truth.cls = is_credulous ? "credulous" : "not_credulous";

    Rng trng = Rng::substream(config.seed, "timeline", i);
    truth.retweet_bybot_rate =
        100.0 * trng.beta(is_credulous ? c_rt.a : nc_rt.a, is_credulous ? c_rt.b : nc_rt.b);
    truth.reply_bybot_rate =
        100.0 * trng.beta(is_credulous ? c_rp.a : nc_rp.a, is_credulous ? c_rp.b : nc_rp.b);
    truth.outlier_retweet = trng.bernoulli(config.outlier_fraction);
    truth.outlier_reply = trng.bernoulli(config.outlier_fraction);

    // per-user activity mix: dirichlet around the class mean
    const double* mix = is_credulous ? detail::kMixCredulous : detail::kMixNotCredulous;
    double g[3];
    double gsum = 0.0;
    for (int k = 0; k < 3; ++k) {
      g[k] = trng.gamma(detail::kMixConcentration * 3.0 * mix[k]);
      gsum += g[k];
    }
    std::size_t length = 2 + trng.poisson(std::max(config.timeline_mean_length - 2.0, 0.0));
    std::size_t n_rt = static_cast<std::size_t>(
        std::llround(static_cast<double>(length) * g[1] / gsum));
    std::size_t n_rp = static_cast<std::size_t>(
        std::llround(static_cast<double>(length) * g[2] / gsum));
    // a non-outlier performs the action at least once; an outlier never does
    n_rt = truth.outlier_retweet ? 0 : std::max<std::size_t>(n_rt, 1);
    n_rp = truth.outlier_reply ? 0 : std::max<std::size_t>(n_rp, 1);
    length = std::max(length, n_rt + n_rp);
    const std::size_t n_pure = length - n_rt - n_rp;

    auto pick_origin = [&](bool bot_origin) {
      if (bot_origin && config.n_bots > 0)
        return account_id(n_humans + trng.uniform_int(config.n_bots));
      return account_id(trng.uniform_int(n_humans));
    };

    std::vector<TweetRecord> timeline;
    timeline.reserve(length);
    std::size_t tweet_no = 0;
    auto push = [&](TweetKind kind, std::optional<std::string> origin) {
      TweetRecord t;
      t.tweet_id = id + "_t" + std::to_string(tweet_no++);
      t.author_id = id;
      t.kind = kind;
      t.origin_author_id = std::move(origin);
      timeline.push_back(std::move(t));
    };
    for (std::size_t k = 0; k < n_pure; ++k) push(TweetKind::pure, std::nullopt);
    for (std::size_t k = 0; k < n_rt; ++k) {
      const bool bybot = config.n_bots > 0 &&
                         trng.bernoulli(truth.retweet_bybot_rate / 100.0);
      push(trng.bernoulli(detail::kQuoteShare) ? TweetKind::quote : TweetKind::retweet,
           pick_origin(bybot));
    }
    for (std::size_t k = 0; k < n_rp; ++k) {
      const bool bybot =
          config.n_bots > 0 && trng.bernoulli(truth.reply_bybot_rate / 100.0);
      push(TweetKind::reply, pick_origin(bybot));
    }
    trng.shuffle(timeline);
    timelines[id] = std::move(timeline);
  }

  auto built = build_corpus(std::move(accounts), std::move(timelines), std::move(bot_labels),
                            std::move(cred_labels));
  return {std::move(built.corpus), GroundTruth{config, std::move(truths)}};
}

inline nlohmann::ordered_json ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::ordered_json j;
  j["seed"] = gt.config.seed;
  j["reference_date"] = format_date(gt.config.reference_date);
  j["n_credulous"] = gt.config.n_credulous;
  j["n_not_credulous"] = gt.config.n_not_credulous;
  j["n_bots"] = gt.config.n_bots;
  j["shifts"] = {{"f3", gt.config.f3_shift},
                 {"f5", gt.config.f5_shift},
                 {"f19", gt.config.f19_shift}};
  j["bybot"] = {{"c_retweet", {gt.config.c_retweet.mean_pct, gt.config.c_retweet.sd_pct}},
                {"nc_retweet", {gt.config.nc_retweet.mean_pct, gt.config.nc_retweet.sd_pct}},
                {"c_reply", {gt.config.c_reply.mean_pct, gt.config.c_reply.sd_pct}},
                {"nc_reply", {gt.config.nc_reply.mean_pct, gt.config.nc_reply.sd_pct}}};
  j["timeline_mean_length"] = gt.config.timeline_mean_length;
  j["outlier_fraction"] = gt.config.outlier_fraction;
  auto users = nlohmann::ordered_json::array();
  for (const auto& u : gt.users) {
    users.push_back({{"account_id", u.account_id},
                     {"class", u.cls},
                     {"retweet_bybot_rate", u.retweet_bybot_rate},
                     {"reply_bybot_rate", u.reply_bybot_rate},
                     {"outlier_retweet", u.outlier_retweet},
                     {"outlier_reply", u.outlier_reply}});
  }
  j["users"] = std::move(users);
  return j;
}

}  // namespace credulens::synth
