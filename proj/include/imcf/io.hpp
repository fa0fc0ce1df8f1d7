#pragma once

// Deterministic output files: trace CSV, snapshot binaries with JSON
// sidecars, and JSON-lines check reports. Identical inputs produce
// byte-identical files.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "imcf/analysis.hpp"
#include "imcf/flow.hpp"

namespace imcf {

inline constexpr const char* kVersion = "0.1.0";

// Shortest-exact decimal for a double ("%.17g" trimmed by round trip).
std::string format_double(double v);

void write_trace_csv(const std::string& path, const FlowTrace& trace,
                     std::uint64_t config_hash, std::uint64_t seed);

// <dir>/<base>.bin (row-major float64) + <dir>/<base>.json sidecar, or a
// single <base>.csv when format == "csv".
void write_snapshot(const std::string& dir, const std::string& base,
                    const GraphState& state, const PeriodicGrid& grid,
                    const std::string& model_name, std::uint64_t config_hash,
                    const std::string& format);

nlohmann::ordered_json report_json(const CheckReport& rep);

void write_reports_jsonl(const std::string& path,
                         const std::vector<nlohmann::ordered_json>& lines);

}  // namespace imcf
