#pragma once

// Induced geometry of a closed spacelike graph M = {(u(x), x)} over the
// torus: metric, normal, second fundamental form, mean curvature, and the
// scan quantities the flow loop monitors.

#include <cstddef>
#include <span>
#include <utility>

#include "imcf/grid.hpp"
#include "imcf/spacetime.hpp"

namespace imcf {

struct GraphState {
  double t = 0.0;   // flow time
  ScalarField u;    // graph height x^0 = u(x)
};

struct GeometryOptions {
  int fd_order = 2;
  double eps_space = 1e-6;  // floor on v^2 = 1 - |Du|^2_sigma
};

struct GeometrySnapshot {
  const PeriodicGrid* grid = nullptr;
  const SpacetimeModel* model = nullptr;
  GraphState state;

  VectorField Du;        // coordinate gradient u_i
  ScalarField v;         // (1 - sigma^{ij} u_i u_j)^{1/2}
  ScalarField vtilde;    // 1 / v
  SymMatrixField g;      // induced metric e^{2psi}(sigma_ij - u_i u_j)
  SymMatrixField ginv;
  ScalarField sqrtg;     // sqrt(det g)
  std::vector<double> nu;  // past-directed unit normal, d+1 comps per point
  SymMatrixField h;      // second fundamental form
  ScalarField H;         // mean curvature g^{ij} h_ij
  ScalarField normA2;    // |A|^2 = h^i_j h^j_i
  int fd_order = 2;      // stencil order the snapshot was built with
  double volume = 0.0;   // |M| = int sqrt(det g)
  double H_min = 0.0, H_max = 0.0;
  double vtilde_max = 0.0;
  double u_min = 0.0, u_max = 0.0;

  std::span<const double> nu_at(std::size_t p) const {
    std::size_t D = static_cast<std::size_t>(grid->dim()) + 1;
    return {nu.data() + p * D, D};
  }
};

// Throws DomainError (u leaves the model's time range), NotSpacelike
// (v^2 <= eps_space), SingularMetric (induced metric degenerate).
GeometrySnapshot compute_geometry(const SpacetimeModel& model, const PeriodicGrid& grid,
                                  const GraphState& state,
                                  const GeometryOptions& opts = {});

// Global (min, max) over all points of the eigenvalues of g^{-1} h.
std::pair<double, double> principal_curvature_range(const GeometrySnapshot& snap);

// max_M vtilde; finite iff the graph stays uniformly spacelike.
double gradient_bound_certificate(const GeometrySnapshot& snap);

}  // namespace imcf
