#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "credulens/parallel.hpp"
#include "credulens/records.hpp"

// Profile-only feature set. Eighteen features keyed F1..F19 with F13 absent;
// everything is computable from a single AccountRecord and a reference date.

namespace credulens {

inline constexpr std::array<std::string_view, 18> kFeatureIds = {
    "F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "F9",
    "F10", "F11", "F12", "F14", "F15", "F16", "F17", "F18", "F19"};

inline int feature_column(std::string_view id) {
  for (std::size_t i = 0; i < kFeatureIds.size(); ++i)
    if (kFeatureIds[i] == id) return static_cast<int>(i);
  throw std::invalid_argument("unknown feature id: " + std::string(id));
}

struct FeatureConfig {
  // Band for "friends per follower is about 100". The source material gives
  // no width, so the band is explicit and surfaced in run configuration.
  double f15_lo = 50.0;
  double f15_hi = 150.0;
};

struct FeatureVector {
  double f1_friends_per_follower_sq = 0.0;
  double f2_age_months = 0.0;
  double f3_tweets = 0.0;
  bool f4_has_name = false;
  double f5_friends = 0.0;
  bool f6_has_url = false;
  double f7_following_rate = 0.0;
  bool f8_default_image_after_2m = false;
  bool f9_in_a_list = false;
  bool f10_has_profile_image = false;
  bool f11_ratio_ge_50 = false;
  bool f12_bot_in_bio = false;
  bool f14_followers_twice_friends = false;
  bool f15_ratio_near_100 = false;
  bool f16_has_location = false;
  bool f17_bare_profile_many_friends = false;
  bool f18_has_bio = false;
  double f19_followers = 0.0;

  std::array<double, 18> to_array() const {
    return {f1_friends_per_follower_sq,
            f2_age_months,
            f3_tweets,
            f4_has_name ? 1.0 : 0.0,
            f5_friends,
            f6_has_url ? 1.0 : 0.0,
            f7_following_rate,
            f8_default_image_after_2m ? 1.0 : 0.0,
            f9_in_a_list ? 1.0 : 0.0,
            f10_has_profile_image ? 1.0 : 0.0,
            f11_ratio_ge_50 ? 1.0 : 0.0,
            f12_bot_in_bio ? 1.0 : 0.0,
            f14_followers_twice_friends ? 1.0 : 0.0,
            f15_ratio_near_100 ? 1.0 : 0.0,
            f16_has_location ? 1.0 : 0.0,
            f17_bare_profile_many_friends ? 1.0 : 0.0,
            f18_has_bio ? 1.0 : 0.0,
            f19_followers};
  }
};

// True when "bot" appears as a standalone token, so "robotics" stays false.
inline bool bio_declares_bot(std::string_view bio) {
  std::string token;
  auto check = [&] {
    const bool hit = token == "bot";
    token.clear();
    return hit;
  };
  for (char c : bio) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else if (check())
      return true;
  }
  return check();
}

inline FeatureVector extract_class_a(const AccountRecord& account, const Date& reference_date,
                                     const FeatureConfig& config = {}) {
  if (reference_date < account.created_at)
    throw std::invalid_argument("extract_class_a: reference_date precedes created_at for " +
                                account.account_id);
  const double friends = static_cast<double>(account.friends_count);
  const double followers = static_cast<double>(account.followers_count);
  // Division by followers clamps the denominator at 1 so a zero-follower
  // account still yields a finite, order-preserving ratio.
  const double followers_denom = std::max(followers, 1.0);
  const double ratio = friends / followers_denom;

  FeatureVector fv;
  fv.f1_friends_per_follower_sq = friends / (followers_denom * followers_denom);
  fv.f2_age_months =
      static_cast<double>(months_between(account.created_at, reference_date));
  fv.f3_tweets = static_cast<double>(account.statuses_count);
  fv.f4_has_name = account.has_name;
  fv.f5_friends = friends;
  fv.f6_has_url = account.has_url;
  fv.f7_following_rate = friends / std::max(friends + followers, 1.0);
  fv.f8_default_image_after_2m = account.default_image_after_2m;
  fv.f9_in_a_list = account.listed_count >= 1;
  fv.f10_has_profile_image = account.has_profile_image;
  fv.f11_ratio_ge_50 = ratio >= 50.0;
  fv.f12_bot_in_bio = account.bio_text && bio_declares_bot(*account.bio_text);
  fv.f14_followers_twice_friends = 2.0 * followers >= friends;
  fv.f15_ratio_near_100 = ratio >= config.f15_lo && ratio <= config.f15_hi;
  fv.f16_has_location = account.has_location;
  fv.f17_bare_profile_many_friends =
      !account.has_bio && !account.has_location && friends >= 100.0;
  fv.f18_has_bio = account.has_bio;
  fv.f19_followers = followers;
  return fv;
}

struct FeatureMatrix {
  std::vector<std::string> account_ids;
  std::vector<std::array<double, 18>> rows;   // one per account, corpus order
  std::vector<std::string> label_names;       // parallel to rows; may be empty strings
};

inline FeatureMatrix extract_matrix(const Corpus& corpus, const Date& reference_date,
                                    const FeatureConfig& config = {}, int workers = 1) {
  FeatureMatrix m;
  const std::size_t n = corpus.accounts.size();
  m.account_ids.resize(n);
  m.rows.resize(n);
  parallel_for(n, workers, [&](std::size_t i) {
    m.account_ids[i] = corpus.accounts[i].account_id;
    m.rows[i] = extract_class_a(corpus.accounts[i], reference_date, config).to_array();
  });
  return m;
}

enum class LabelTask { bot, credulous };

// Rows whose account carries the task's label, with labels attached.
// Positive class: bot for the bot task, credulous for the credulous task.
struct LabeledRows {
  std::vector<std::size_t> source_rows;  // indices into the full matrix
  std::vector<std::array<double, 18>> rows;
  std::vector<int> labels;  // 1 = positive class
};

inline LabeledRows labeled_subset(const FeatureMatrix& matrix, const Corpus& corpus,
                                  LabelTask task) {
  LabeledRows out;
  for (std::size_t i = 0; i < matrix.account_ids.size(); ++i) {
    const auto& id = matrix.account_ids[i];
    int label = -1;
    if (task == LabelTask::bot) {
      auto it = corpus.bot_labels.find(id);
      if (it != corpus.bot_labels.end()) label = it->second == BotLabel::bot ? 1 : 0;
    } else {
      auto it = corpus.credulous_labels.find(id);
      if (it != corpus.credulous_labels.end())
        label = it->second == CredLabel::credulous ? 1 : 0;
    }
    if (label < 0) continue;
    out.source_rows.push_back(i);
    out.rows.push_back(matrix.rows[i]);
    out.labels.push_back(label);
  }
  return out;
}

// Boolean features are stored as 0/1; this set drives CSV formatting.
inline bool feature_is_boolean(std::size_t column) {
  switch (column) {
    case 0: case 1: case 2: case 4: case 6: case 17: return false;  // F1 F2 F3 F5 F7 F19
    default: return true;
  }
}

inline void write_features_csv(std::ostream& out, const FeatureMatrix& matrix) {
  out << "account_id";
  for (auto id : kFeatureIds) out << ',' << id;
  out << ",label\n";
  char buf[64];
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    out << matrix.account_ids[i];
    for (std::size_t c = 0; c < kFeatureIds.size(); ++c) {
      if (feature_is_boolean(c)) {
        out << ',' << (matrix.rows[i][c] != 0.0 ? 1 : 0);
      } else {
        std::snprintf(buf, sizeof buf, "%.6f", matrix.rows[i][c]);
        out << ',' << buf;
      }
    }
    out << ',' << (i < matrix.label_names.size() ? matrix.label_names[i] : "") << '\n';
  }
}

}  // namespace credulens
