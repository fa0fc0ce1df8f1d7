#pragma once

// Run configuration: a small TOML-like format (sections, key = value, strings,
// numbers, booleans, single-line arrays, # comments). Schema violations are
// collected and reported together in one ConfigError.

#include <cstdint>
#include <string>
#include <vector>

#include "imcf/flow.hpp"
#include "imcf/grid.hpp"
#include "imcf/spacetime.hpp"

namespace imcf {

struct FourierMode {
  double amplitude = 0.0;
  int mode = 1;
  int axis = 0;
  double phase = 0.0;
};

struct RunConfig {
  // [model]
  std::string model_name;  // minkowski | exprw | sads
  int dim = 1;
  double lambda = 1.0;                   // exprw
  double x0_min = 0.0, x0_max = 1.0;     // minkowski
  double Lambda = -1.0, mass = 1.0;      // sads
  int n_sads = 1, kappa = 0;
  std::vector<double> periods;           // empty: model default

  // [grid]
  std::vector<int> shape;

  // [initial]
  std::string initial_kind = "constant";  // constant | fourier | file
  double u0 = 0.0;
  std::vector<FourierMode> modes;         // fourier perturbations on top of u0
  std::string initial_file;

  // [flow]
  FlowConfig flow;

  // [checks]
  int check_samples = 1000;
  int check_nx = 32;
  std::uint64_t seed = 12345;
  double barrier_threshold = 1.0;
  double phi_const = 0.0;  // 0: use half the measured inf e^{psi} Hbar profile

  // [output]
  std::string output_dir = ".";
  bool write_snapshots = false;
  std::string snapshot_format = "binary";  // binary | csv

  std::string raw_text;       // exact file contents, hashed into output headers
  std::uint64_t config_hash = 0;
};

RunConfig parse_config_string(const std::string& text);
RunConfig parse_config_file(const std::string& path);

SpacetimeModel build_model(const RunConfig& cfg);
PeriodicGrid build_grid(const RunConfig& cfg, const SpacetimeModel& model);
ScalarField build_initial(const RunConfig& cfg, const SpacetimeModel& model,
                          const PeriodicGrid& grid);

}  // namespace imcf
