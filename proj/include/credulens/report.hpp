#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "credulens/rng.hpp"
#include "credulens/version.hpp"

// Report plumbing. Every report file embeds the tool version, the seed and
// a digest of the decision-bearing configuration, so any number in any
// output can be traced to the run that produced it.

namespace credulens::report {

struct Provenance {
  std::uint64_t seed = 0;
  std::string config;         // canonical decision-bearing config string
  std::string config_digest;  // hex fnv-1a of the canonical config string
};

inline std::string digest_hex(const std::string& canonical_config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config)));
  return buf;
}

inline nlohmann::ordered_json envelope(const Provenance& p) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["seed"] = p.seed;
  j["config_digest"] = p.config_digest;
  j["config"] = p.config;
  return j;
}

inline std::string csv_header_comment(const Provenance& p) {
  return std::string("# tool=") + kToolName + " version=" + kToolVersion +
         " seed=" + std::to_string(p.seed) + " config=" + p.config_digest + " | " + p.config +
         "\n";
}

// Refuses to clobber existing reports unless the run was forced.
class ReportWriter {
 public:
  ReportWriter(std::filesystem::path dir, Provenance provenance, bool force)
      : dir_(std::move(dir)), provenance_(std::move(provenance)), force_(force) {
    std::filesystem::create_directories(dir_);
  }

  const Provenance& provenance() const { return provenance_; }
  const std::filesystem::path& dir() const { return dir_; }

  std::ofstream open(const std::string& name) const {
    const auto path = dir_ / name;
    if (!force_ && std::filesystem::exists(path))
      throw std::runtime_error("refusing to overwrite " + path.string() +
                               " (pass --force to allow)");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
  }

  void write_json(const std::string& name, nlohmann::ordered_json payload) const {
    auto j = envelope(provenance_);
    for (auto& [key, value] : payload.items()) j[key] = std::move(value);
    auto out = open(name);
    out << j.dump(2) << '\n';
  }

  std::ofstream open_csv(const std::string& name) const {
    auto out = open(name);
    out << csv_header_comment(provenance_);
    return out;
  }

 private:
  std::filesystem::path dir_;
  Provenance provenance_;
  bool force_ = false;
};

inline std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace credulens::report
