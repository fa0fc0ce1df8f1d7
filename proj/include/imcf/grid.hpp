#pragma once

// Structured periodic grids over the Cauchy hypersurface and the
// finite-difference calculus the geometry and flow modules build on.
// Topology is an exact torus: indices wrap, there are no ghost cells.

#include <cstddef>
#include <span>
#include <vector>

#include "imcf/linalg.hpp"

namespace imcf {

class PeriodicGrid {
 public:
  PeriodicGrid(std::vector<int> shape, std::vector<double> periods);

  int dim() const { return d_; }
  std::size_t npoints() const { return npoints_; }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& periods() const { return periods_; }
  const std::vector<double>& spacing() const { return spacing_; }
  double min_spacing() const;
  double cell_volume() const;  // prod h_i

  // Row-major flat index, last axis fastest.
  void multi_index(std::size_t p, std::span<int> idx) const;
  void coords(std::size_t p, std::span<double> x) const;

  // Wrapped neighbor of p shifted by `offset` along `axis`.
  std::size_t shift(std::size_t p, int axis, int offset) const;

 private:
  int d_;
  std::vector<int> shape_;
  std::vector<double> periods_, spacing_;
  std::vector<std::size_t> strides_;
  std::size_t npoints_;
};

// Contiguous float64 samples in row-major point order.
struct ScalarField {
  const PeriodicGrid* grid = nullptr;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const PeriodicGrid& g, double fill = 0.0)
      : grid(&g), v(g.npoints(), fill) {}
  double& operator[](std::size_t p) { return v[p]; }
  double operator[](std::size_t p) const { return v[p]; }
};

struct VectorField {
  const PeriodicGrid* grid = nullptr;
  std::vector<double> v;  // [point][component]

  VectorField() = default;
  explicit VectorField(const PeriodicGrid& g)
      : grid(&g), v(g.npoints() * g.dim(), 0.0) {}
  std::span<double> at(std::size_t p) {
    return {v.data() + p * grid->dim(), static_cast<std::size_t>(grid->dim())};
  }
  std::span<const double> at(std::size_t p) const {
    return {v.data() + p * grid->dim(), static_cast<std::size_t>(grid->dim())};
  }
};

// Symmetric d x d matrix per point, packed upper-triangular (see linalg.hpp).
struct SymMatrixField {
  const PeriodicGrid* grid = nullptr;
  std::vector<double> v;

  SymMatrixField() = default;
  explicit SymMatrixField(const PeriodicGrid& g)
      : grid(&g), v(g.npoints() * la::sym_size(g.dim()), 0.0) {}
  int nsym() const { return la::sym_size(grid->dim()); }
  std::span<double> at(std::size_t p) {
    return {v.data() + p * nsym(), static_cast<std::size_t>(nsym())};
  }
  std::span<const double> at(std::size_t p) const {
    return {v.data() + p * nsym(), static_cast<std::size_t>(nsym())};
  }
};

// Gamma^k_{ij} per point; k-major, (ij) packed symmetric.
struct ChristoffelField {
  const PeriodicGrid* grid = nullptr;
  std::vector<double> v;

  ChristoffelField() = default;
  explicit ChristoffelField(const PeriodicGrid& g)
      : grid(&g), v(g.npoints() * g.dim() * la::sym_size(g.dim()), 0.0) {}
  double gamma(std::size_t p, int k, int i, int j) const {
    int d = grid->dim();
    int ns = la::sym_size(d);
    return v[(p * d + k) * ns + la::sym_index(i, j, d)];
  }
  std::span<double> at(std::size_t p, int k) {
    int d = grid->dim();
    int ns = la::sym_size(d);
    return {v.data() + (p * d + k) * ns, static_cast<std::size_t>(ns)};
  }
};

// Periodic central differences; order 2 or 4.
VectorField fd_gradient(const ScalarField& f, int order = 2);
SymMatrixField fd_hessian(const ScalarField& f, int order = 2);

// Derivative of a single packed component along one axis (helper for tensor
// fields; same stencils as fd_gradient).
void fd_axis_derivative(const PeriodicGrid& grid, std::span<const double> comp,
                        std::size_t stride, int axis, int order, std::span<double> out);

// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), derivatives from
// periodic central differences applied componentwise.
ChristoffelField metric_christoffels(const SymMatrixField& g, int order = 2);

// u_{;ij} = u_{,ij} - Gamma^k_{ij} u_k.
SymMatrixField covariant_hessian(const ScalarField& u, const ChristoffelField& gamma,
                                 int order = 2);

// Rectangle rule (trapezoid on a periodic grid): sum f * weight * prod(h_i).
double integrate(const ScalarField& f, const ScalarField& weight);
double integrate(const ScalarField& f);

}  // namespace imcf
