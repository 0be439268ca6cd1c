#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bimult {

inline constexpr const char* kToolVersion = "bimult 0.1.0";

/// FNV-1a 64 of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

struct ExperimentRecord {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  std::string config_hash;
  std::uint64_t master_seed = 0;
  nlohmann::json trials = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();  // measured, predicted?, pass, series
  std::optional<double> wall_clock;                   // seconds; omitted by default so reruns stay byte-identical
  std::string tool_version = kToolVersion;

  bool passed() const;
};

nlohmann::json to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const nlohmann::json& j);

/// <experiment>-<config_hash>-<seed>.jsonl
std::string record_file_name(const ExperimentRecord& r);

/// One record per line. Refuses to replace an existing file unless `force`.
void write_jsonl(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records, bool force);
std::vector<ExperimentRecord> read_jsonl(const std::filesystem::path& path);

/// Writes `text` to `path`, refusing to replace an existing file unless `force`.
void write_text_file(const std::filesystem::path& path, const std::string& text, bool force);

/// RFC 4180 quoting where needed.
std::string csv_field(const std::string& s);

/// Shortest decimal that round-trips, as used in JSON output.
std::string format_double(double v);

}  // namespace bimult
