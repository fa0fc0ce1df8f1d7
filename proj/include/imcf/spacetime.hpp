#pragma once

// Ambient Lorentzian manifolds as analytic conformal-product metrics
//   ds^2 = e^{2 psi} (-(dx^0)^2 + sigma_ij dx^i dx^j)
// over a toroidal Cauchy hypersurface, plus the slice geometry and curvature
// quantities the flow and the checkers consume.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "imcf/linalg.hpp"

namespace imcf {

struct SpacetimeModel {
  std::string name;
  int d = 1;                       // spatial dimension of the Cauchy hypersurface
  double x0_min = 0.0, x0_max = 0.0;  // open interval; x0_max may be +inf
  // Finite window used by seeded random samplers (checkers).
  double sample_x0_min = 0.0, sample_x0_max = 0.0;
  std::vector<double> periods;     // toroidal coordinate lengths L_1..L_d
  bool spatially_homogeneous = false;

  // All callables are pure; sigma and its derivatives use packed symmetric
  // storage of size d(d+1)/2 (dsigmak is k-major, d blocks).
  std::function<double(double, std::span<const double>)> psi;
  std::function<void(double, std::span<const double>, double&, std::span<double>)> dpsi;
  std::function<void(double, std::span<const double>, std::span<double>)> sigma;
  std::function<void(double, std::span<const double>, std::span<double>)> dsigma0;
  std::function<void(double, std::span<const double>, std::span<double>)> dsigmak;
  // Closed-form Ricci contraction R_ab nu^a nu^b; empty means "use the
  // finite-difference fallback".
  std::function<double(double, std::span<const double>, std::span<const double>)> ricci_nu_nu;

  double curvature_fd_step = 1e-3;

  int nsym() const { return la::sym_size(d); }
  bool contains(double x0) const { return x0 > x0_min && x0 < x0_max; }
  void require_inside(double x0) const;  // throws DomainError
};

// Time-index Christoffel blocks of the conformal-product metric:
// Gamma^0_00 = psidot, Gamma^0_0i = psi_i, Gamma^0_ij = sigmadot/2 + psidot sigma.
struct ChristoffelTime {
  double g000 = 0.0;
  std::vector<double> g00i;   // d entries
  std::vector<double> g0ij;   // packed symmetric
};

// Second fundamental form of the coordinate slice {x^0 = const} with respect
// to the past-directed normal: hbar_ij e^{-psi} = -sigmadot/2 - psidot sigma.
struct SliceGeometry {
  std::vector<double> hbar;   // packed symmetric
  double Hbar = 0.0;
  double conf = 1.0;          // e^{psi}
};

ChristoffelTime christoffel_time(const SpacetimeModel& model, double x0,
                                 std::span<const double> x);
SliceGeometry slice_geometry(const SpacetimeModel& model, double x0,
                             std::span<const double> x);

// R_ab nu^a nu^b for a timelike contravariant nu (d+1 components); uses the
// model closed form when present, otherwise second-order central differences
// of the metric with step model.curvature_fd_step.
double ambient_ricci_contraction(const SpacetimeModel& model, double x0,
                                 std::span<const double> x, std::span<const double> nu);

// Always computes via finite differences (oracle path for closed forms).
double ambient_ricci_contraction_fd(const SpacetimeModel& model, double x0,
                                    std::span<const double> x, std::span<const double> nu);

// Riemannian reference norm (gtilde = e^{2psi}((dx^0)^2 + sigma))^{1/2}.
double reference_norm(const SpacetimeModel& model, double x0,
                      std::span<const double> x, std::span<const double> eta);

// Built-in models.
SpacetimeModel make_minkowski_slab(int d, double x0_min, double x0_max,
                                   std::vector<double> periods = {});
// psi = -lambda x^0, sigma = delta; slices have e^{psi} Hbar = d*lambda.
SpacetimeModel make_exprw(double lambda, int d, std::vector<double> periods = {});
// Interior of a Schwarzschild-anti-de-Sitter spacetime, written in
// conformal-product form with a future-directed time coordinate x^0 = r0 - r
// (the black-hole singularity r = 0 is the future end). Grid-global build
// requires n = 1 (spatial section T^2) and kappa = 0.
SpacetimeModel make_sads_interior(int n, double Lambda, double m, int kappa);

// New time coordinate xt^0 = int_{tau0}^{x^0} phi with phi > 0; the wrapped
// model has e^{psit} = e^{psi}/phi and sigmat = phi^2 sigma, so that the
// slices satisfy e^{psit} Hbar >= 1 whenever e^{psi} Hbar >= phi.
// b defaults to the model's upper end (a finite cap is applied when infinite).
SpacetimeModel reparameterize(const SpacetimeModel& model,
                              std::function<double(double)> phi, double tau0,
                              double b = -1.0);

}  // namespace imcf
