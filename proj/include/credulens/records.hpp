#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "credulens/time.hpp"

namespace credulens {

// One profile snapshot. Historical facts the platform would expose over time
// (F8's "still on the default image two months in") arrive as explicit input
// fields; this tool never crawls account history.
struct AccountRecord {
  std::string account_id;
  std::int64_t friends_count = 0;
  std::int64_t followers_count = 0;
  std::int64_t statuses_count = 0;
  Date created_at;
  bool has_name = false;
  bool has_bio = false;
  std::optional<std::string> bio_text;
  bool has_url = false;
  bool has_location = false;
  bool has_profile_image = false;
  bool default_image_after_2m = false;
  std::int64_t listed_count = 0;
};

enum class TweetKind { pure, retweet, quote, reply };

inline const char* tweet_kind_name(TweetKind k) {
  switch (k) {
    case TweetKind::pure: return "pure";
    case TweetKind::retweet: return "retweet";
    case TweetKind::quote: return "quote";
    case TweetKind::reply: return "reply";
  }
  return "?";
}

inline std::optional<TweetKind> parse_tweet_kind(const std::string& s) {
  if (s == "pure") return TweetKind::pure;
  if (s == "retweet") return TweetKind::retweet;
  if (s == "quote") return TweetKind::quote;
  if (s == "reply") return TweetKind::reply;
  return std::nullopt;
}

// One timeline item. origin_author_id is present exactly when the item
// reacts to someone else's tweet (retweet, quote, reply).
struct TweetRecord {
  std::string tweet_id;
  std::string author_id;
  TweetKind kind = TweetKind::pure;
  std::optional<std::string> origin_author_id;
};

enum class BotLabel { bot, human };
enum class CredLabel { credulous, not_credulous };

inline const char* bot_label_name(BotLabel l) { return l == BotLabel::bot ? "bot" : "human"; }
inline const char* cred_label_name(CredLabel l) {
  return l == CredLabel::credulous ? "credulous" : "not_credulous";
}

// Immutable after construction; safe for concurrent reads downstream.
struct Corpus {
  std::vector<AccountRecord> accounts;
  std::unordered_map<std::string, std::size_t> account_index;  // id -> position
  std::unordered_map<std::string, std::vector<TweetRecord>> timelines;
  std::unordered_map<std::string, BotLabel> bot_labels;
  std::unordered_map<std::string, CredLabel> credulous_labels;

  const AccountRecord* find_account(const std::string& id) const {
    auto it = account_index.find(id);
    return it == account_index.end() ? nullptr : &accounts[it->second];
  }
};

struct CorpusStats {
  std::size_t accounts = 0;
  std::size_t bots = 0;
  std::size_t humans = 0;
  std::size_t credulous = 0;
  std::size_t not_credulous = 0;
  std::vector<std::string> dangling_label_ids;       // labels with no account
  std::vector<std::string> dangling_timeline_ids;    // timelines with no account
  std::size_t timeline_count = 0;
  std::size_t tweet_count = 0;
  double timeline_coverage_pct = 0.0;  // accounts with a timeline / accounts
};

}  // namespace credulens
