#pragma once

// Verification side of the lab: hypothesis checkers on ambient models,
// evolution-equation residuals on flow snapshots, the time function of the
// foliation, and a high-accuracy ODE oracle for homogeneous runs.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "imcf/flow.hpp"
#include "imcf/spacetime.hpp"

namespace imcf {

struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_value = 0.0;    // signed margin or residual at the worst sample
  double worst_time = 0.0;     // x^0 (or flow time) of the worst sample
  std::vector<double> worst_x;
  int samples = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
};

// min over seeded samples of R_ab nu^a nu^b for timelike nu; passes when the
// minimum stays above -1e-8.
CheckReport check_timelike_convergence(const SpacetimeModel& model, int n_samples,
                                       std::uint64_t seed);

struct BarrierProfile {
  std::vector<double> x0;
  std::vector<double> inf_H;  // inf over sampled x of the slice mean curvature Hbar
};

// inf_x Hbar along x0_seq (the coordinate slices as the barrier sequence);
// passes when the final infimum clears the threshold and the profile is
// nondecreasing past its minimum.
CheckReport probe_mean_curvature_barrier(const SpacetimeModel& model,
                                         std::span<const double> x0_seq, double threshold,
                                         int n_x, std::uint64_t seed,
                                         BarrierProfile* profile = nullptr);

struct DecayProfile {
  std::vector<double> tau_samples;
  std::vector<double> inf_eH;             // inf_x e^{psi} Hbar at each tau
  std::vector<double> phi;                // barrier function at each tau
  std::vector<double> partial_integrals;  // int_{tau0}^{tau} phi (trapezoid)
};

struct DecayCheckResult {
  CheckReport report;
  DecayProfile profile;
};

// e^{psi} Hbar >= phi(x0) - 1e-10 on [tau0, b], sampled on an n_tau x n_x
// product of times and seeded spatial points. Divergence of the integral of
// phi is reported as partial-integral growth, not decided.
DecayCheckResult check_strong_volume_decay(const SpacetimeModel& model, double tau0,
                                           double b,
                                           const std::function<double(double)>& phi,
                                           int n_tau, int n_x, std::uint64_t seed);

struct VolumeIdentityResult {
  CheckReport report;        // corrected identity: dlog det gbar = -2 e^{psi} Hbar dx^0
  double literal_residual;   // same comparison without the factor of 2
};

// Integrates e^{psi} Hbar over [tau0, b] at fixed spatial points and compares
// against the log-determinant drop of the slice metric; worst relative
// residual over the sample points.
VolumeIdentityResult volume_identity_residual(const SpacetimeModel& model, double tau0,
                                              double b,
                                              const std::vector<std::vector<double>>& x_samples,
                                              int n_nodes = 4096);

// Sup-norm residual of d/dt g_ij = -2 H^{-1} h_ij, transported to the graph
// gauge (the Lie-derivative terms along the spatial drift theta^k = -H^{-1} nu^k
// are added back). Forward quotient; evaluated at snapshot a, so O(dt).
double residual_metric_evolution(const GeometrySnapshot& a, const GeometrySnapshot& b,
                                 double dt);

// Sup-norm residual of the mean-curvature evolution in the form
// D_t H^{-1} = H^{-2} Delta H^{-1} - H^{-2} (|A|^2 + Rbar(nu,nu)) H^{-1},
// with D_t the graph-gauge total derivative (centered, nonuniform steps,
// advection along the spatial drift added back).
double residual_Hinv_evolution(const GeometrySnapshot& prev, const GeometrySnapshot& mid,
                               const GeometrySnapshot& next, double dt_prev,
                               double dt_next);

// tau = 1 - e^{-t/d} and its inverse; RangeError outside [0, 1).
double tau_of_t(double t, int d);
double t_of_tau(double tau, int d);

// Max proper time of seeded constant-velocity future curves started on the
// flow surface at t_eval, compared against (d / inf_{M_0} H) * (1 - tau).
CheckReport lifespan_bound_check(const SpacetimeModel& model, const FlowTrace& trace,
                                 double t_eval, int n_curves, std::uint64_t seed);

struct FoliationTime {
  double t = 0.0;
  double tau = 0.0;
};

// Flow time at which the foliation passes through (x0, x); monotone-cubic
// inverse of u(t) at the nearest grid point. OutOfFoliation outside the
// swept range.
FoliationTime time_function_lookup(const FlowTrace& trace, double x0,
                                   std::span<const double> x);

// Dense-output solution of the spatially homogeneous reduction
// du/dt = e^{-psi(u)} / Hbar(u).
class HomogeneousSolution {
 public:
  double operator()(double t) const;  // RangeError outside [0, t_end]
  double t_end() const { return ts_.back(); }

 private:
  friend HomogeneousSolution homogeneous_oracle(const SpacetimeModel&, double, double,
                                                double);
  std::vector<double> ts_, us_, dus_;  // accepted nodes; cubic Hermite between
};

HomogeneousSolution homogeneous_oracle(const SpacetimeModel& model, double u0,
                                       double t_max, double tol = 1e-10);

}  // namespace imcf
