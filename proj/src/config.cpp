#include "imcf/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "imcf/errors.hpp"
#include "imcf/util.hpp"

namespace imcf {

namespace {

struct Value {
  enum Kind { Str, Num, Bool, Arr } kind = Num;
  std::string s;
  double num = 0.0;
  bool b = false;
  std::vector<Value> arr;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Drop a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

Value parse_scalar(const std::string& tok, int line, std::vector<std::string>& errs) {
  Value v;
  v.line = line;
  if (!tok.empty() && tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') {
      errs.push_back("line " + std::to_string(line) + ": unterminated string");
      return v;
    }
    v.kind = Value::Str;
    v.s = tok.substr(1, tok.size() - 2);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.kind = Value::Bool;
    v.b = tok == "true";
    return v;
  }
  char* end = nullptr;
  v.num = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    errs.push_back("line " + std::to_string(line) + ": cannot parse value '" + tok + "'");
    v.num = 0.0;
  }
  v.kind = Value::Num;
  return v;
}

Value parse_value(const std::string& tok, int line, std::vector<std::string>& errs) {
  if (!tok.empty() && tok.front() == '[') {
    Value v;
    v.kind = Value::Arr;
    v.line = line;
    if (tok.back() != ']') {
      errs.push_back("line " + std::to_string(line) + ": unterminated array");
      return v;
    }
    std::string inner = tok.substr(1, tok.size() - 2);
    std::string cur;
    bool in_str = false;
    auto flush = [&]() {
      std::string t = trim(cur);
      if (!t.empty()) v.arr.push_back(parse_scalar(t, line, errs));
      cur.clear();
    };
    for (char c : inner) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        flush();
      } else {
        cur += c;
      }
    }
    flush();
    return v;
  }
  return parse_scalar(tok, line, errs);
}

using KvMap = std::map<std::string, Value>;

KvMap parse_toml_subset(const std::string& text, std::vector<std::string>& errs) {
  KvMap out;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        errs.push_back("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    std::size_t eq = std::string::npos;
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '=' && !in_str) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string path = section.empty() ? key : section + "." + key;
    if (out.count(path))
      errs.push_back("line " + std::to_string(lineno) + ": duplicate key '" + path + "'");
    out[path] = parse_value(val, lineno, errs);
  }
  return out;
}

// Typed lookups; every touched key lands in `used` so leftovers can be
// reported as unknown.
struct Schema {
  const KvMap& kv;
  std::set<std::string>* used;
  std::vector<std::string>* errs;

  const Value* find(const std::string& path) const {
    auto it = kv.find(path);
    if (it == kv.end()) return nullptr;
    used->insert(path);
    return &it->second;
  }
  bool has(const std::string& path) const { return kv.count(path) > 0; }

  std::string str(const std::string& path, const std::string& dflt) const {
    const Value* v = find(path);
    if (!v) return dflt;
    if (v->kind != Value::Str) {
      errs->push_back(path + ": expected a string");
      return dflt;
    }
    return v->s;
  }
  double num(const std::string& path, double dflt) const {
    const Value* v = find(path);
    if (!v) return dflt;
    if (v->kind != Value::Num) {
      errs->push_back(path + ": expected a number");
      return dflt;
    }
    return v->num;
  }
  long integer(const std::string& path, long dflt) const {
    const Value* v = find(path);
    if (!v) return dflt;
    if (v->kind != Value::Num || v->num != std::floor(v->num)) {
      errs->push_back(path + ": expected an integer");
      return dflt;
    }
    return static_cast<long>(v->num);
  }
  bool boolean(const std::string& path, bool dflt) const {
    const Value* v = find(path);
    if (!v) return dflt;
    if (v->kind != Value::Bool) {
      errs->push_back(path + ": expected true or false");
      return dflt;
    }
    return v->b;
  }
  std::vector<double> num_array(const std::string& path) const {
    const Value* v = find(path);
    std::vector<double> out;
    if (!v) return out;
    if (v->kind != Value::Arr) {
      errs->push_back(path + ": expected an array");
      return out;
    }
    for (const Value& e : v->arr) {
      if (e.kind != Value::Num) {
        errs->push_back(path + ": expected an array of numbers");
        return {};
      }
      out.push_back(e.num);
    }
    return out;
  }
  std::vector<long> int_array(const std::string& path) const {
    std::vector<long> out;
    for (double x : num_array(path)) {
      if (x != std::floor(x)) {
        errs->push_back(path + ": expected an array of integers");
        return {};
      }
      out.push_back(static_cast<long>(x));
    }
    return out;
  }
};

void fail(const std::vector<std::string>& errs) {
  std::string msg;
  for (const std::string& e : errs) {
    if (!msg.empty()) msg += "; ";
    msg += e;
  }
  throw ConfigError(msg);
}

}  // namespace

RunConfig parse_config_string(const std::string& text) {
  std::vector<std::string> errs;
  KvMap kv = parse_toml_subset(text, errs);
  std::set<std::string> used;
  Schema s{kv, &used, &errs};

  RunConfig cfg;
  cfg.raw_text = text;
  cfg.config_hash = fnv1a(std::span<const char>(text.data(), text.size()));

  cfg.model_name = s.str("model.name", "");
  if (cfg.model_name.empty()) errs.push_back("model.name: required");
  bool known_model = cfg.model_name == "minkowski" || cfg.model_name == "exprw" ||
                     cfg.model_name == "sads";
  if (!cfg.model_name.empty() && !known_model)
    errs.push_back("model.name: '" + cfg.model_name +
                   "' is not one of minkowski, exprw, sads");

  if (cfg.model_name == "sads") {
    cfg.n_sads = static_cast<int>(s.integer("model.n", 1));
    cfg.Lambda = s.num("model.Lambda", -1.0);
    cfg.mass = s.num("model.m", 1.0);
    cfg.kappa = static_cast<int>(s.integer("model.kappa", 0));
    cfg.dim = cfg.n_sads + 1;
  } else {
    cfg.dim = static_cast<int>(s.integer("model.dim", 1));
    if (cfg.dim < 1 || cfg.dim > 3) errs.push_back("model.dim: must be 1, 2, or 3");
    if (cfg.model_name == "exprw") {
      cfg.lambda = s.num("model.lambda", 1.0);
      if (!(cfg.lambda > 0.0)) errs.push_back("model.lambda: must be positive");
    } else if (cfg.model_name == "minkowski") {
      cfg.x0_min = s.num("model.x0_min", 0.0);
      cfg.x0_max = s.num("model.x0_max", 1.0);
      if (!(cfg.x0_max > cfg.x0_min))
        errs.push_back("model.x0_max: must exceed model.x0_min");
    }
  }
  cfg.periods = s.num_array("model.periods");
  if (!cfg.periods.empty()) {
    if (static_cast<int>(cfg.periods.size()) != cfg.dim)
      errs.push_back("model.periods: needs one entry per spatial dimension");
    for (double L : cfg.periods)
      if (!(L > 0.0)) errs.push_back("model.periods: entries must be positive");
  }

  std::vector<long> shape = s.int_array("grid.shape");
  if (!s.has("grid.shape")) {
    errs.push_back("grid.shape: required");
  } else {
    if (static_cast<int>(shape.size()) != cfg.dim && !shape.empty())
      errs.push_back("grid.shape: needs one entry per spatial dimension");
    for (long n : shape) {
      if (n < 8) errs.push_back("grid.shape: every entry must be >= 8");
      cfg.shape.push_back(static_cast<int>(n));
    }
  }

  cfg.initial_kind = s.str("initial.kind", "constant");
  if (cfg.initial_kind != "constant" && cfg.initial_kind != "fourier" &&
      cfg.initial_kind != "file")
    errs.push_back("initial.kind: must be constant, fourier, or file");
  cfg.u0 = s.num("initial.u0", 0.0);
  if (cfg.initial_kind == "fourier") {
    std::vector<double> amp = s.num_array("initial.amplitude");
    std::vector<long> mode = s.int_array("initial.mode");
    std::vector<long> axis = s.int_array("initial.axis");
    std::vector<double> phase = s.num_array("initial.phase");
    if (amp.empty()) errs.push_back("initial.amplitude: required for fourier data");
    if (mode.size() != amp.size() || (!axis.empty() && axis.size() != amp.size()) ||
        (!phase.empty() && phase.size() != amp.size())) {
      errs.push_back("initial: amplitude/mode/axis/phase arrays must have equal length");
    } else {
      for (std::size_t k = 0; k < amp.size(); ++k) {
        FourierMode fm;
        fm.amplitude = amp[k];
        fm.mode = static_cast<int>(mode[k]);
        fm.axis = axis.empty() ? 0 : static_cast<int>(axis[k]);
        fm.phase = phase.empty() ? 0.0 : phase[k];
        if (fm.mode < 1) errs.push_back("initial.mode: entries must be >= 1");
        if (fm.axis < 0 || fm.axis >= cfg.dim)
          errs.push_back("initial.axis: entries must be in [0, dim)");
        cfg.modes.push_back(fm);
      }
    }
  } else if (cfg.initial_kind == "file") {
    cfg.initial_file = s.str("initial.file", "");
    if (cfg.initial_file.empty()) errs.push_back("initial.file: required for file data");
  }

  cfg.flow.cfl = s.num("flow.cfl", cfg.flow.cfl);
  cfg.flow.t_max = s.num("flow.t_max", cfg.flow.t_max);
  cfg.flow.fd_order = static_cast<int>(s.integer("flow.fd_order", cfg.flow.fd_order));
  cfg.flow.H_min_floor = s.num("flow.H_min_floor", cfg.flow.H_min_floor);
  cfg.flow.vtilde_abort = s.num("flow.vtilde_abort", cfg.flow.vtilde_abort);
  cfg.flow.record_every =
      static_cast<int>(s.integer("flow.record_every", cfg.flow.record_every));
  cfg.flow.snapshot_every = s.num("flow.snapshot_every", cfg.flow.snapshot_every);
  cfg.flow.dt_max = s.num("flow.dt_max", cfg.flow.dt_max);
  cfg.flow.eps_space = s.num("flow.eps_space", cfg.flow.eps_space);
  std::string integ = s.str("flow.integrator", "rk2");
  if (integ == "euler") {
    cfg.flow.integrator = Integrator::Euler;
  } else if (integ == "rk2") {
    cfg.flow.integrator = Integrator::Rk2;
  } else if (integ == "rk4") {
    cfg.flow.integrator = Integrator::Rk4;
  } else {
    errs.push_back("flow.integrator: must be euler, rk2, or rk4");
  }
  try {
    cfg.flow.validate();
  } catch (const ConfigError& e) {
    errs.push_back(e.what());
  }

  cfg.check_samples = static_cast<int>(s.integer("checks.n_samples", cfg.check_samples));
  cfg.check_nx = static_cast<int>(s.integer("checks.n_x", cfg.check_nx));
  cfg.seed = static_cast<std::uint64_t>(s.integer("checks.seed", static_cast<long>(cfg.seed)));
  cfg.barrier_threshold = s.num("checks.threshold", cfg.barrier_threshold);
  cfg.phi_const = s.num("checks.phi", cfg.phi_const);
  if (cfg.phi_const < 0.0) errs.push_back("checks.phi: must be >= 0");
  if (cfg.check_samples < 1) errs.push_back("checks.n_samples: must be >= 1");
  if (cfg.check_nx < 1) errs.push_back("checks.n_x: must be >= 1");

  cfg.output_dir = s.str("output.dir", cfg.output_dir);
  cfg.write_snapshots = s.boolean("output.snapshots", cfg.write_snapshots);
  cfg.snapshot_format = s.str("output.snapshot_format", cfg.snapshot_format);
  if (cfg.snapshot_format != "binary" && cfg.snapshot_format != "csv")
    errs.push_back("output.snapshot_format: must be binary or csv");

  for (const auto& [path, v] : kv)
    if (!used.count(path))
      errs.push_back("line " + std::to_string(v.line) + ": unknown key '" + path + "'");

  // Flat-background estimate of |Du|_sigma for fourier data; a graph that is
  // obviously null or worse is rejected here rather than at the first step.
  if (cfg.initial_kind == "fourier" && errs.empty()) {
    std::vector<double> periods = cfg.periods;
    if (periods.empty()) periods.assign(cfg.dim, 2.0 * M_PI);
    std::vector<double> per_axis(cfg.dim, 0.0);
    for (const FourierMode& fm : cfg.modes)
      per_axis[fm.axis] += std::abs(fm.amplitude) * fm.mode * 2.0 * M_PI / periods[fm.axis];
    double grad2 = 0.0;
    for (double g : per_axis) grad2 += g * g;
    if (grad2 >= 1.0 - 1e-3)
      errs.push_back("initial: fourier amplitudes make the graph null or timelike (|Du| ~ " +
                     std::to_string(std::sqrt(grad2)) + ")");
  }

  if (!errs.empty()) fail(errs);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

SpacetimeModel build_model(const RunConfig& cfg) {
  if (cfg.model_name == "minkowski")
    return make_minkowski_slab(cfg.dim, cfg.x0_min, cfg.x0_max, cfg.periods);
  if (cfg.model_name == "exprw") return make_exprw(cfg.lambda, cfg.dim, cfg.periods);
  if (cfg.model_name == "sads")
    return make_sads_interior(cfg.n_sads, cfg.Lambda, cfg.mass, cfg.kappa);
  throw ConfigError("unknown model '" + cfg.model_name + "'");
}

PeriodicGrid build_grid(const RunConfig& cfg, const SpacetimeModel& model) {
  try {
    return PeriodicGrid(cfg.shape, model.periods);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ScalarField build_initial(const RunConfig& cfg, const SpacetimeModel& model,
                          const PeriodicGrid& grid) {
  ScalarField u(grid, cfg.u0);
  if (cfg.initial_kind == "constant") return u;
  if (cfg.initial_kind == "fourier") {
    std::vector<double> x(grid.dim());
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
      grid.coords(p, x);
      for (const FourierMode& fm : cfg.modes)
        u[p] += fm.amplitude *
                std::sin(2.0 * M_PI * fm.mode * x[fm.axis] / model.periods[fm.axis] +
                         fm.phase);
    }
    return u;
  }
  // file: whitespace-separated float64 text, one value per grid point in
  // row-major order.
  std::ifstream in(cfg.initial_file);
  if (!in) throw ConfigError("cannot open initial data file '" + cfg.initial_file + "'");
  for (std::size_t p = 0; p < grid.npoints(); ++p)
    if (!(in >> u[p]))
      throw ConfigError("initial data file '" + cfg.initial_file + "' has fewer than " +
                        std::to_string(grid.npoints()) + " values");
  double extra;
  if (in >> extra)
    throw ConfigError("initial data file '" + cfg.initial_file + "' has more than " +
                      std::to_string(grid.npoints()) + " values");
  return u;
}

}  // namespace imcf
