#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bimult/records.hpp"

namespace bimult {

/// counting, khintchine, growth-A, growth-B, corpus, levelset, decomposition, lemma-discrete
const std::vector<std::string>& experiment_names();

nlohmann::json default_experiment_config(const std::string& name);

/// Defaults updated key by key from `overrides`. Unknown keys are a SchemaError.
nlohmann::json resolve_experiment_config(const std::string& name, const nlohmann::json& overrides);

/// Runs a named experiment and evaluates its threshold. The record is a pure
/// function of (name, resolved config, master_seed); `workers` only changes speed.
ExperimentRecord run_experiment(const std::string& name, const nlohmann::json& overrides, std::uint64_t master_seed,
                                unsigned workers = 1);

/// Per-trial table as CSV, with config_hash and tool_version columns.
std::string trials_csv(const ExperimentRecord& r);

}  // namespace bimult
