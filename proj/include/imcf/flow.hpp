#pragma once

// Time integration of the graph flow du/dt = e^{-psi} v / H with explicit
// steppers and a parabolic stability bound on dt.

#include <string>
#include <vector>

#include "imcf/geometry.hpp"

namespace imcf {

enum class Integrator { Euler, Rk2, Rk4 };

struct FlowConfig {
  double cfl = 0.5;
  double t_max = 1.0;
  int fd_order = 2;
  double H_min_floor = 1e-8;    // abort threshold: NonPositiveH below this
  double vtilde_abort = 1e6;    // abort threshold: NumericalBlowup above this
  int record_every = 10;        // trace row cadence in steps
  double snapshot_every = 0.0;  // t-cadence; 0: keep only the initial and final states
  Integrator integrator = Integrator::Rk2;
  double dt_max = 0.0;          // 0: no cap beyond stability
  double eps_space = 1e-6;

  void validate() const;  // throws ConfigError
};

struct FlowRecord {
  double t = 0.0;
  double tau = 0.0;             // 1 - e^{-t/d}
  double dt = 0.0;              // step taken out of this row's time
  double volume = 0.0;
  double H_min = 0.0, H_max = 0.0;
  double vtilde_max = 0.0;
  double u_min = 0.0, u_max = 0.0;
  // Pointwise evolution residuals over the previous step(s); NaN until
  // enough history exists.
  double residual_g = 0.0;
  double residual_Hinv = 0.0;
};

struct FlowTrace {
  const SpacetimeModel* model = nullptr;
  const PeriodicGrid* grid = nullptr;
  int d = 1;
  double c0 = 0.0;          // inf_M0 H
  double lifespan_c = 0.0;  // d / c0
  std::vector<FlowRecord> records;
  std::vector<GraphState> snapshots;  // always includes the initial and final states
  std::string stop_reason;            // "t_max" or the error that ended the run early
};

// cfl * min_p (H_p^2 / lambda_max(g^{-1}_p)) * h_min^2 / (2 d): explicit-Euler
// stability for the linearization H^{-2} Delta_g of the speed.
double stable_dt(const GeometrySnapshot& snap, const FlowConfig& cfg);

// One step from `state` (recomputes the stage geometry). Throws NonPositiveH /
// NumericalBlowup / the compute_geometry errors.
GraphState step(const SpacetimeModel& model, const PeriodicGrid& grid,
                const GraphState& state, double dt, const FlowConfig& cfg);

// Full run from u0 at t = 0. Throws InitialDataInvalid if H <= 0 somewhere on
// the initial graph; later step failures stop the run gracefully and are
// reported in stop_reason.
FlowTrace run(const SpacetimeModel& model, const PeriodicGrid& grid,
              const ScalarField& u0, const FlowConfig& cfg);

}  // namespace imcf
