#include "bimult/records.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bimult/error.hpp"

namespace bimult {

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ExperimentRecord::passed() const { return summary.value("pass", false); }

nlohmann::json to_json(const ExperimentRecord& r) {
  nlohmann::json j{{"experiment", r.experiment}, {"config_hash", r.config_hash}, {"tool_version", r.tool_version},
                   {"master_seed", r.master_seed}, {"config", r.config},        {"trials", r.trials},
                   {"summary", r.summary}};
  if (r.wall_clock) j["wall_clock"] = *r.wall_clock;
  return j;
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  try {
    ExperimentRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.config = j.at("config");
    r.trials = j.at("trials");
    r.summary = j.at("summary");
    if (!r.config.is_object() || !r.trials.is_array() || !r.summary.is_object())
      throw SchemaError("record: config/summary must be objects and trials an array");
    if (j.contains("wall_clock")) r.wall_clock = j.at("wall_clock").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("record: ") + e.what());
  }
}

std::string record_file_name(const ExperimentRecord& r) {
  return r.experiment + "-" + r.config_hash + "-" + std::to_string(r.master_seed) + ".jsonl";
}

void write_text_file(const std::filesystem::path& path, const std::string& text, bool force) {
  if (!force && std::filesystem::exists(path))
    throw InvalidArgument("refusing to overwrite " + path.string() + " (use --force)");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records, bool force) {
  std::string text;
  for (const auto& r : records) text += to_json(r).dump() + "\n";
  write_text_file(path, text, force);
}

std::vector<ExperimentRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<ExperimentRecord> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string format_double(double v) { return nlohmann::json(v).dump(); }

}  // namespace bimult
