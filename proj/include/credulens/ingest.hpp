#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "credulens/records.hpp"

// Line-delimited loaders. A malformed line never aborts a load: it is
// quarantined with its line number and reason, and record count plus reject
// count always equals the file's line count.

namespace credulens {

struct RejectedLine {
  std::string file;
  std::size_t line_no = 0;  // 1-based
  std::string reason;
};

template <class T>
struct LoadResult {
  T value;
  std::vector<RejectedLine> rejects;
  std::size_t line_count = 0;
};

namespace detail {

inline std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  return in;
}

inline bool get_count(const nlohmann::json& j, const char* key, std::int64_t& out,
                      std::string& err) {
  if (!j.contains(key)) {
    err = std::string("missing field: ") + key;
    return false;
  }
  if (!j[key].is_number_integer()) {
    err = std::string("field not an integer: ") + key;
    return false;
  }
  out = j[key].get<std::int64_t>();
  if (out < 0) {
    err = std::string("negative count: ") + key;
    return false;
  }
  return true;
}

inline bool get_bool(const nlohmann::json& j, const char* key, bool& out, std::string& err) {
  if (!j.contains(key)) {
    err = std::string("missing field: ") + key;
    return false;
  }
  if (!j[key].is_boolean()) {
    err = std::string("field not a boolean: ") + key;
    return false;
  }
  out = j[key].get<bool>();
  return true;
}

inline bool get_string(const nlohmann::json& j, const char* key, std::string& out,
                       std::string& err) {
  if (!j.contains(key) || !j[key].is_string()) {
    err = std::string("missing or non-string field: ") + key;
    return false;
  }
  out = j[key].get<std::string>();
  return true;
}

inline bool parse_account_line(const std::string& line, AccountRecord& rec, std::string& err) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    err = "not a JSON object";
    return false;
  }
  if (!get_string(j, "account_id", rec.account_id, err)) return false;
  if (rec.account_id.empty()) {
    err = "empty account_id";
    return false;
  }
  if (!get_count(j, "friends_count", rec.friends_count, err)) return false;
  if (!get_count(j, "followers_count", rec.followers_count, err)) return false;
  if (!get_count(j, "statuses_count", rec.statuses_count, err)) return false;
  if (!get_count(j, "listed_count", rec.listed_count, err)) return false;
  std::string date;
  if (!get_string(j, "created_at", date, err)) return false;
  const auto parsed = parse_date(date);
  if (!parsed) {
    err = "created_at is not an ISO-8601 date: " + date;
    return false;
  }
  rec.created_at = *parsed;
  if (!get_bool(j, "has_name", rec.has_name, err)) return false;
  if (!get_bool(j, "has_bio", rec.has_bio, err)) return false;
  if (!get_bool(j, "has_url", rec.has_url, err)) return false;
  if (!get_bool(j, "has_location", rec.has_location, err)) return false;
  if (!get_bool(j, "has_profile_image", rec.has_profile_image, err)) return false;
  if (!get_bool(j, "default_image_after_2m", rec.default_image_after_2m, err)) return false;
  if (j.contains("bio_text") && !j["bio_text"].is_null()) {
    if (!j["bio_text"].is_string()) {
      err = "bio_text is not a string";
      return false;
    }
    rec.bio_text = j["bio_text"].get<std::string>();
  }
  return true;
}

inline bool parse_tweet_line(const std::string& line, TweetRecord& rec, std::string& err) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    err = "not a JSON object";
    return false;
  }
  if (!get_string(j, "tweet_id", rec.tweet_id, err)) return false;
  if (!get_string(j, "author_id", rec.author_id, err)) return false;
  std::string kind;
  if (!get_string(j, "kind", kind, err)) return false;
  const auto parsed = parse_tweet_kind(kind);
  if (!parsed) {
    err = "unknown kind: " + kind;
    return false;
  }
  rec.kind = *parsed;
  if (j.contains("origin_author_id") && !j["origin_author_id"].is_null()) {
    if (!j["origin_author_id"].is_string()) {
      err = "origin_author_id is not a string";
      return false;
    }
    rec.origin_author_id = j["origin_author_id"].get<std::string>();
  }
  const bool needs_origin = rec.kind != TweetKind::pure;
  if (needs_origin && !rec.origin_author_id) {
    err = std::string(tweet_kind_name(rec.kind)) + " without origin_author_id";
    return false;
  }
  if (!needs_origin && rec.origin_author_id) {
    err = "pure tweet with origin_author_id";
    return false;
  }
  return true;
}

template <class PerLine>
std::size_t for_each_line(std::istream& in, PerLine&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    fn(line_no, line);
  }
  return line_no;
}

}  // namespace detail

inline LoadResult<std::vector<AccountRecord>> load_accounts(const std::filesystem::path& path) {
  auto in = detail::open_or_throw(path);
  LoadResult<std::vector<AccountRecord>> out;
  std::unordered_set<std::string> seen;
  out.line_count = detail::for_each_line(in, [&](std::size_t line_no, const std::string& line) {
    if (line.find_first_not_of(" \t") == std::string::npos) {
      out.rejects.push_back({path.string(), line_no, "blank line"});
      return;
    }
    AccountRecord rec;
    std::string err;
    if (!detail::parse_account_line(line, rec, err)) {
      out.rejects.push_back({path.string(), line_no, err});
      return;
    }
    if (!seen.insert(rec.account_id).second) {
      out.rejects.push_back({path.string(), line_no, "duplicate account_id: " + rec.account_id});
      return;
    }
    out.value.push_back(std::move(rec));
  });
  return out;
}

using TimelineMap = std::unordered_map<std::string, std::vector<TweetRecord>>;

inline LoadResult<TimelineMap> load_tweets(const std::filesystem::path& path) {
  auto in = detail::open_or_throw(path);
  LoadResult<TimelineMap> out;
  std::unordered_set<std::string> seen;
  out.line_count = detail::for_each_line(in, [&](std::size_t line_no, const std::string& line) {
    if (line.find_first_not_of(" \t") == std::string::npos) {
      out.rejects.push_back({path.string(), line_no, "blank line"});
      return;
    }
    TweetRecord rec;
    std::string err;
    if (!detail::parse_tweet_line(line, rec, err)) {
      out.rejects.push_back({path.string(), line_no, err});
      return;
    }
    if (!seen.insert(rec.tweet_id).second) {
      out.rejects.push_back({path.string(), line_no, "duplicate tweet_id: " + rec.tweet_id});
      return;
    }
    out.value[rec.author_id].push_back(std::move(rec));
  });
  return out;
}

// labels.csv: two columns, header required. Values are validated against the
// two known label alphabets when the map is typed by the caller.
inline LoadResult<std::vector<std::pair<std::string, std::string>>> load_labels(
    const std::filesystem::path& path) {
  auto in = detail::open_or_throw(path);
  LoadResult<std::vector<std::pair<std::string, std::string>>> out;
  bool header_ok = false;
  out.line_count = detail::for_each_line(in, [&](std::size_t line_no, const std::string& line) {
    if (line_no == 1) {
      header_ok = line == "account_id,label";
      if (!header_ok) out.rejects.push_back({path.string(), 1, "bad header: " + line});
      return;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      out.rejects.push_back({path.string(), line_no, "blank line"});
      return;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      out.rejects.push_back({path.string(), line_no, "expected two columns"});
      return;
    }
    std::string id = line.substr(0, comma);
    std::string label = line.substr(comma + 1);
    if (id.empty() || label.empty()) {
      out.rejects.push_back({path.string(), line_no, "empty column"});
      return;
    }
    out.value.emplace_back(std::move(id), std::move(label));
  });
  if (out.line_count == 0) out.rejects.push_back({path.string(), 0, "missing header"});
  return out;
}

template <class Enum>
struct TypedLabels {
  std::unordered_map<std::string, Enum> labels;
  std::vector<RejectedLine> rejects;
};

inline TypedLabels<BotLabel> type_bot_labels(
    const LoadResult<std::vector<std::pair<std::string, std::string>>>& raw) {
  TypedLabels<BotLabel> out;
  out.rejects = raw.rejects;
  std::size_t row = 1;
  for (const auto& [id, label] : raw.value) {
    ++row;
    if (label == "bot") out.labels[id] = BotLabel::bot;
    else if (label == "human") out.labels[id] = BotLabel::human;
    else out.rejects.push_back({"", row, "unknown bot label: " + label});
  }
  return out;
}

inline TypedLabels<CredLabel> type_credulous_labels(
    const LoadResult<std::vector<std::pair<std::string, std::string>>>& raw) {
  TypedLabels<CredLabel> out;
  out.rejects = raw.rejects;
  std::size_t row = 1;
  for (const auto& [id, label] : raw.value) {
    ++row;
    if (label == "credulous") out.labels[id] = CredLabel::credulous;
    else if (label == "not_credulous") out.labels[id] = CredLabel::not_credulous;
    else out.rejects.push_back({"", row, "unknown credulous label: " + label});
  }
  return out;
}

struct CorpusBuild {
  Corpus corpus;
  std::vector<RejectedLine> rejects;  // timelines whose author is unknown
};

inline CorpusBuild build_corpus(std::vector<AccountRecord> accounts, TimelineMap timelines,
                                std::unordered_map<std::string, BotLabel> bot_labels = {},
                                std::unordered_map<std::string, CredLabel> cred_labels = {}) {
  CorpusBuild out;
  out.corpus.accounts = std::move(accounts);
  for (std::size_t i = 0; i < out.corpus.accounts.size(); ++i)
    out.corpus.account_index[out.corpus.accounts[i].account_id] = i;
  for (auto& [author, tweets] : timelines) {
    if (out.corpus.account_index.count(author)) {
      out.corpus.timelines.emplace(author, std::move(tweets));
    } else {
      out.rejects.push_back({"", 0, "timeline for unknown account: " + author});
    }
  }
  out.corpus.bot_labels = std::move(bot_labels);
  out.corpus.credulous_labels = std::move(cred_labels);
  return out;
}

inline CorpusStats validate_corpus(const Corpus& corpus) {
  CorpusStats s;
  s.accounts = corpus.accounts.size();
  for (const auto& [id, label] : corpus.bot_labels) {
    if (!corpus.account_index.count(id)) {
      s.dangling_label_ids.push_back(id);
      continue;
    }
    (label == BotLabel::bot ? s.bots : s.humans) += 1;
  }
  for (const auto& [id, label] : corpus.credulous_labels) {
    if (!corpus.account_index.count(id)) {
      s.dangling_label_ids.push_back(id);
      continue;
    }
    (label == CredLabel::credulous ? s.credulous : s.not_credulous) += 1;
  }
  for (const auto& [id, tweets] : corpus.timelines) {
    if (!corpus.account_index.count(id)) {
      s.dangling_timeline_ids.push_back(id);
      continue;
    }
    s.timeline_count += 1;
    s.tweet_count += tweets.size();
  }
  std::sort(s.dangling_label_ids.begin(), s.dangling_label_ids.end());
  std::sort(s.dangling_timeline_ids.begin(), s.dangling_timeline_ids.end());
  s.timeline_coverage_pct =
      s.accounts == 0 ? 0.0
                      : 100.0 * static_cast<double>(s.timeline_count) /
                            static_cast<double>(s.accounts);
  return s;
}

// ---- writers (the synth module and round-trip checks share these) ----

inline std::string account_to_jsonl(const AccountRecord& a) {
  nlohmann::ordered_json j;
  j["account_id"] = a.account_id;
  j["friends_count"] = a.friends_count;
  j["followers_count"] = a.followers_count;
  j["statuses_count"] = a.statuses_count;
  j["created_at"] = format_date(a.created_at);
  j["has_name"] = a.has_name;
  j["has_bio"] = a.has_bio;
  if (a.bio_text) j["bio_text"] = *a.bio_text;
  j["has_url"] = a.has_url;
  j["has_location"] = a.has_location;
  j["has_profile_image"] = a.has_profile_image;
  j["default_image_after_2m"] = a.default_image_after_2m;
  j["listed_count"] = a.listed_count;
  return j.dump();
}

inline std::string tweet_to_jsonl(const TweetRecord& t) {
  nlohmann::ordered_json j;
  j["tweet_id"] = t.tweet_id;
  j["author_id"] = t.author_id;
  j["kind"] = tweet_kind_name(t.kind);
  if (t.origin_author_id) j["origin_author_id"] = *t.origin_author_id;
  return j.dump();
}

inline void write_accounts_jsonl(const std::filesystem::path& path,
                                 const std::vector<AccountRecord>& accounts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (const auto& a : accounts) out << account_to_jsonl(a) << '\n';
}

// Tweets are written in account order so a written corpus is reproducible.
inline void write_tweets_jsonl(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (const auto& a : corpus.accounts) {
    auto it = corpus.timelines.find(a.account_id);
    if (it == corpus.timelines.end()) continue;
    for (const auto& t : it->second) out << tweet_to_jsonl(t) << '\n';
  }
}

template <class Enum, class NameFn>
void write_labels_csv(const std::filesystem::path& path, const Corpus& corpus,
                      const std::unordered_map<std::string, Enum>& labels, NameFn name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << "account_id,label\n";
  for (const auto& a : corpus.accounts) {
    auto it = labels.find(a.account_id);
    if (it != labels.end()) out << a.account_id << ',' << name(it->second) << '\n';
  }
}

}  // namespace credulens
