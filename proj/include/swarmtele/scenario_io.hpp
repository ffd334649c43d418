#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swarmtele/design.hpp"
#include "swarmtele/scenario.hpp"
#include "swarmtele/trace.hpp"
#include "swarmtele/verifier.hpp"

namespace swarmtele {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parses a scenario document. Unknown keys, wrong types and missing
/// required fields throw SchemaError. Edges use 1-based robot labels.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Fingerprint of the canonical scenario document.
std::string scenario_hash(const Scenario& scenario);

nlohmann::json design_to_json(const DesignResult& result);
DesignResult design_from_json(const nlohmann::json& doc);

/// Trace CSV columns:
///   t,
///   per robot i (1-based): x{i}_{k}..., xdot{i}_{k}..., u{i}_{k}..., K{i}
///   f_{k}...,
///   per edge (a,b): d{a}_{b}
///   V_p, V
std::vector<std::string> trace_columns(const Scenario& scenario);

/// Writes trace.csv and metadata.json into `dir` (created if missing).
void write_trace(const SimTrace& trace, const std::filesystem::path& dir);
/// Throws TraceLoadError on missing files, a header mismatch or a bad cell.
SimTrace load_trace(const std::filesystem::path& dir);

nlohmann::json design_report_json(const Scenario& scenario, const DesignResult& result,
                                  const std::vector<DesignCondition>& conditions);
std::string design_report_text(const Scenario& scenario, const DesignResult& result,
                               const std::vector<DesignCondition>& conditions);

nlohmann::json certificate_json(const CertificateReport& report, const SimTrace& trace);
std::string certificate_text(const CertificateReport& report, const SimTrace& trace);

}  // namespace swarmtele
