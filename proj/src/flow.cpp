#include "imcf/flow.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "imcf/analysis.hpp"
#include "imcf/errors.hpp"

namespace imcf {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// du/dt = e^{-psi} v / H = -v^2 nu^0 / H (nu is the past-directed normal, so
// nu^0 = -1/(v e^{psi}) and the speed is positive for H > 0).
void flow_speed(const GeometrySnapshot& snap, const FlowConfig& cfg,
                std::vector<double>& out) {
  const std::size_t n = snap.grid->npoints();
  const std::size_t D = static_cast<std::size_t>(snap.grid->dim()) + 1;
  if (!(snap.H_min > cfg.H_min_floor)) {
    std::ostringstream ss;
    ss << "mean curvature dropped to " << snap.H_min << " at t = " << snap.state.t;
    throw NonPositiveH(ss.str());
  }
  if (snap.vtilde_max > cfg.vtilde_abort || !std::isfinite(snap.vtilde_max)) {
    std::ostringstream ss;
    ss << "gradient blowup: vtilde = " << snap.vtilde_max << " at t = " << snap.state.t;
    throw NumericalBlowup(ss.str());
  }
  out.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    double v = snap.v[p];
    out[p] = -v * v * snap.nu[p * D] / snap.H[p];
  }
}

GeometryOptions geom_opts(const FlowConfig& cfg) {
  GeometryOptions o;
  o.fd_order = cfg.fd_order;
  o.eps_space = cfg.eps_space;
  return o;
}

GraphState advance(const SpacetimeModel& model, const PeriodicGrid& grid,
                   const GeometrySnapshot& snap0, double dt, const FlowConfig& cfg) {
  const std::size_t n = grid.npoints();
  std::vector<double> k1, k2, k3, k4;
  flow_speed(snap0, cfg, k1);
  GraphState next = snap0.state;
  next.t += dt;

  auto stage = [&](double frac, const std::vector<double>& k, std::vector<double>& kout) {
    GraphState mid = snap0.state;
    mid.t += frac * dt;
    for (std::size_t p = 0; p < n; ++p) mid.u[p] += frac * dt * k[p];
    GeometrySnapshot s = compute_geometry(model, grid, mid, geom_opts(cfg));
    flow_speed(s, cfg, kout);
  };

  switch (cfg.integrator) {
    case Integrator::Euler:
      for (std::size_t p = 0; p < n; ++p) next.u[p] += dt * k1[p];
      break;
    case Integrator::Rk2:
      stage(1.0, k1, k2);
      for (std::size_t p = 0; p < n; ++p) next.u[p] += 0.5 * dt * (k1[p] + k2[p]);
      break;
    case Integrator::Rk4:
      stage(0.5, k1, k2);
      stage(0.5, k2, k3);
      stage(1.0, k3, k4);
      for (std::size_t p = 0; p < n; ++p)
        next.u[p] += dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
      break;
  }
  for (std::size_t p = 0; p < n; ++p)
    if (!std::isfinite(next.u[p])) throw NumericalBlowup("non-finite graph height");
  return next;
}

FlowRecord make_record(const GeometrySnapshot& s, int d, double dt, double rg, double rh) {
  FlowRecord r;
  r.t = s.state.t;
  r.tau = 1.0 - std::exp(-s.state.t / d);
  r.dt = dt;
  r.volume = s.volume;
  r.H_min = s.H_min;
  r.H_max = s.H_max;
  r.vtilde_max = s.vtilde_max;
  r.u_min = s.u_min;
  r.u_max = s.u_max;
  r.residual_g = rg;
  r.residual_Hinv = rh;
  return r;
}

}  // namespace

void FlowConfig::validate() const {
  std::string bad;
  if (!(cfl > 0.0 && cfl <= 1.0)) bad += " cfl must be in (0, 1];";
  if (!(t_max > 0.0)) bad += " t_max must be positive;";
  if (fd_order != 2 && fd_order != 4) bad += " fd_order must be 2 or 4;";
  if (!(H_min_floor >= 0.0)) bad += " H_min_floor must be >= 0;";
  if (record_every < 1) bad += " record_every must be >= 1;";
  if (snapshot_every < 0.0) bad += " snapshot_every must be >= 0;";
  if (dt_max < 0.0) bad += " dt_max must be >= 0;";
  if (!(eps_space > 0.0 && eps_space < 1.0)) bad += " eps_space must be in (0, 1);";
  if (!bad.empty()) throw ConfigError("flow config:" + bad);
}

double stable_dt(const GeometrySnapshot& snap, const FlowConfig& cfg) {
  const int d = snap.grid->dim();
  std::vector<double> evals(d);
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < snap.grid->npoints(); ++p) {
    la::sym_eigenvalues(snap.ginv.at(p), d, evals);
    double H = snap.H[p];
    ratio = std::min(ratio, H * H / evals[d - 1]);
  }
  double h = snap.grid->min_spacing();
  return cfg.cfl * ratio * h * h / (2.0 * d);
}

GraphState step(const SpacetimeModel& model, const PeriodicGrid& grid,
                const GraphState& state, double dt, const FlowConfig& cfg) {
  GeometrySnapshot snap = compute_geometry(model, grid, state, geom_opts(cfg));
  return advance(model, grid, snap, dt, cfg);
}

FlowTrace run(const SpacetimeModel& model, const PeriodicGrid& grid,
              const ScalarField& u0, const FlowConfig& cfg) {
  cfg.validate();
  const int d = grid.dim();

  FlowTrace trace;
  trace.model = &model;
  trace.grid = &grid;
  trace.d = d;

  GraphState state;
  state.t = 0.0;
  state.u = u0;
  state.u.grid = &grid;

  GeometrySnapshot snap = compute_geometry(model, grid, state, geom_opts(cfg));
  if (!(snap.H_min > 0.0)) {
    std::ostringstream ss;
    ss << "initial graph has min H = " << snap.H_min << " (needs H > 0)";
    throw InitialDataInvalid(ss.str());
  }
  trace.c0 = snap.H_min;
  trace.lifespan_c = static_cast<double>(d) / trace.c0;
  trace.snapshots.push_back(state);

  // Rolling history for the residual columns.
  GeometrySnapshot hist2, hist1;  // two and one steps back
  double dt2 = 0.0, dt1 = 0.0;
  int have = 0;

  long step_count = 0;
  double next_snap =
      cfg.snapshot_every > 0.0 ? cfg.snapshot_every : std::numeric_limits<double>::infinity();
  trace.stop_reason = "t_max";
  while (state.t < cfg.t_max * (1.0 - 1e-14)) {
    double dt = stable_dt(snap, cfg);
    if (cfg.dt_max > 0.0) dt = std::min(dt, cfg.dt_max);
    dt = std::min(dt, cfg.t_max - state.t);
    dt = std::min(dt, next_snap - state.t);  // land exactly on snapshot times
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw NumericalBlowup("stable step size collapsed to zero");

    if (step_count % cfg.record_every == 0) {
      double rg = have >= 1 ? residual_metric_evolution(hist1, snap, dt1) : kNaN;
      double rh = have >= 2 ? residual_Hinv_evolution(hist2, hist1, snap, dt2, dt1) : kNaN;
      trace.records.push_back(make_record(snap, d, dt, rg, rh));
    }

    GraphState next;
    try {
      next = advance(model, grid, snap, dt, cfg);
    } catch (const Error& e) {
      trace.stop_reason = e.name();
      break;
    }
    hist2 = std::move(hist1);
    dt2 = dt1;
    hist1 = std::move(snap);
    dt1 = dt;
    have = std::min(have + 1, 2);
    state = next;
    try {
      snap = compute_geometry(model, grid, state, geom_opts(cfg));
    } catch (const Error& e) {
      trace.stop_reason = e.name();
      snap = std::move(hist1);  // last valid geometry
      state = snap.state;
      have = 0;
      break;
    }
    ++step_count;
    if (state.t >= next_snap * (1.0 - 1e-14)) {
      trace.snapshots.push_back(state);
      while (next_snap <= state.t * (1.0 + 1e-14)) next_snap += cfg.snapshot_every;
    }
  }

  // Final row and state.
  double rg = have >= 1 ? residual_metric_evolution(hist1, snap, dt1) : kNaN;
  double rh = have >= 2 ? residual_Hinv_evolution(hist2, hist1, snap, dt2, dt1) : kNaN;
  trace.records.push_back(make_record(snap, d, 0.0, rg, rh));
  if (trace.snapshots.back().t != state.t) trace.snapshots.push_back(state);
  return trace;
}

}  // namespace imcf
