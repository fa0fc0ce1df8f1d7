#include "imcf/io.hpp"

#include <cstdio>
#include <fstream>

#include "imcf/errors.hpp"

namespace imcf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  return out;
}

void write_header(std::ofstream& out, std::uint64_t config_hash, std::uint64_t seed) {
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(config_hash));
  out << "# imcf v" << kVersion << "\n";
  out << "# config_hash=" << hex << "\n";
  out << "# seed=" << seed << "\n";
}
}  // namespace

void write_trace_csv(const std::string& path, const FlowTrace& trace,
                     std::uint64_t config_hash, std::uint64_t seed) {
  std::ofstream out = open_out(path);
  write_header(out, config_hash, seed);
  out << "t,tau,dt,volume,H_min,H_max,vtilde_max,u_min,u_max,residual_g,residual_Hinv\n";
  for (const FlowRecord& r : trace.records) {
    out << format_double(r.t) << ',' << format_double(r.tau) << ',' << format_double(r.dt)
        << ',' << format_double(r.volume) << ',' << format_double(r.H_min) << ','
        << format_double(r.H_max) << ',' << format_double(r.vtilde_max) << ','
        << format_double(r.u_min) << ',' << format_double(r.u_max) << ','
        << format_double(r.residual_g) << ',' << format_double(r.residual_Hinv) << '\n';
  }
}

void write_snapshot(const std::string& dir, const std::string& base,
                    const GraphState& state, const PeriodicGrid& grid,
                    const std::string& model_name, std::uint64_t config_hash,
                    const std::string& format) {
  if (format == "csv") {
    std::ofstream out = open_out(dir + "/" + base + ".csv");
    write_header(out, config_hash, 0);
    out << "# t=" << format_double(state.t) << "\nu\n";
    for (double u : state.u.v) out << format_double(u) << '\n';
    return;
  }
  {
    std::ofstream out = open_out(dir + "/" + base + ".bin", true);
    out.write(reinterpret_cast<const char*>(state.u.v.data()),
              static_cast<std::streamsize>(state.u.v.size() * sizeof(double)));
  }
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(config_hash));
  nlohmann::ordered_json side;
  side["version"] = kVersion;
  side["t"] = state.t;
  side["shape"] = grid.shape();
  side["periods"] = grid.periods();
  side["model"] = model_name;
  side["config_hash"] = hex;
  side["data"] = base + ".bin";
  side["dtype"] = "float64";
  side["order"] = "row-major";
  std::ofstream out = open_out(dir + "/" + base + ".json");
  out << side.dump(2) << '\n';
}

nlohmann::ordered_json report_json(const CheckReport& rep) {
  nlohmann::ordered_json j;
  j["name"] = rep.name;
  j["passed"] = rep.passed;
  j["worst_value"] = rep.worst_value;
  j["worst_time"] = rep.worst_time;
  j["worst_x"] = rep.worst_x;
  j["samples"] = rep.samples;
  j["tolerance"] = rep.tolerance;
  j["seed"] = rep.seed;
  return j;
}

void write_reports_jsonl(const std::string& path,
                         const std::vector<nlohmann::ordered_json>& lines) {
  std::ofstream out = open_out(path);
  for (const auto& j : lines) out << j.dump() << '\n';
}

}  // namespace imcf
