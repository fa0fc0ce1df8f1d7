#include "imcf/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "imcf/errors.hpp"

namespace imcf {

PeriodicGrid::PeriodicGrid(std::vector<int> shape, std::vector<double> periods)
    : d_(static_cast<int>(shape.size())), shape_(std::move(shape)), periods_(std::move(periods)) {
  if (d_ < 1) throw std::invalid_argument("PeriodicGrid: empty shape");
  if (periods_.size() != static_cast<std::size_t>(d_))
    throw std::invalid_argument("PeriodicGrid: shape/periods size mismatch");
  npoints_ = 1;
  spacing_.resize(d_);
  for (int a = 0; a < d_; ++a) {
    if (shape_[a] < 8) throw std::invalid_argument("PeriodicGrid: every N_i must be >= 8");
    if (!(periods_[a] > 0.0)) throw std::invalid_argument("PeriodicGrid: periods must be positive");
    spacing_[a] = periods_[a] / shape_[a];
    npoints_ *= static_cast<std::size_t>(shape_[a]);
  }
  strides_.resize(d_);
  std::size_t s = 1;
  for (int a = d_ - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(shape_[a]);
  }
}

double PeriodicGrid::min_spacing() const {
  double h = spacing_[0];
  for (double s : spacing_) h = std::min(h, s);
  return h;
}

double PeriodicGrid::cell_volume() const {
  double w = 1.0;
  for (double s : spacing_) w *= s;
  return w;
}

void PeriodicGrid::multi_index(std::size_t p, std::span<int> idx) const {
  for (int a = 0; a < d_; ++a) idx[a] = static_cast<int>((p / strides_[a]) % shape_[a]);
}

void PeriodicGrid::coords(std::size_t p, std::span<double> x) const {
  for (int a = 0; a < d_; ++a)
    x[a] = static_cast<double>((p / strides_[a]) % shape_[a]) * spacing_[a];
}

std::size_t PeriodicGrid::shift(std::size_t p, int axis, int offset) const {
  int n = shape_[axis];
  int i = static_cast<int>((p / strides_[axis]) % n);
  int j = ((i + offset) % n + n) % n;
  return p + (static_cast<std::size_t>(j) - static_cast<std::size_t>(i)) * strides_[axis];
}

void fd_axis_derivative(const PeriodicGrid& grid, std::span<const double> comp,
                        std::size_t stride, int axis, int order, std::span<double> out) {
  const std::size_t n = grid.npoints();
  const double h = grid.spacing()[axis];
  if (order == 2) {
    const double c = 1.0 / (2.0 * h);
    for (std::size_t p = 0; p < n; ++p)
      out[p] = c * (comp[grid.shift(p, axis, 1) * stride] - comp[grid.shift(p, axis, -1) * stride]);
  } else if (order == 4) {
    const double c = 1.0 / (12.0 * h);
    for (std::size_t p = 0; p < n; ++p)
      out[p] = c * (-comp[grid.shift(p, axis, 2) * stride] + 8.0 * comp[grid.shift(p, axis, 1) * stride] -
                    8.0 * comp[grid.shift(p, axis, -1) * stride] + comp[grid.shift(p, axis, -2) * stride]);
  } else {
    throw std::invalid_argument("fd order must be 2 or 4");
  }
}

VectorField fd_gradient(const ScalarField& f, int order) {
  const PeriodicGrid& grid = *f.grid;
  const int d = grid.dim();
  const std::size_t n = grid.npoints();
  VectorField out(grid);
  std::vector<double> da(n);
  for (int a = 0; a < d; ++a) {
    fd_axis_derivative(grid, f.v, 1, a, order, da);
    for (std::size_t p = 0; p < n; ++p) out.v[p * d + a] = da[p];
  }
  return out;
}

SymMatrixField fd_hessian(const ScalarField& f, int order) {
  const PeriodicGrid& grid = *f.grid;
  const int d = grid.dim();
  const std::size_t n = grid.npoints();
  SymMatrixField out(grid);
  const int ns = out.nsym();
  // Diagonal entries from the compact second-derivative stencil.
  for (int a = 0; a < d; ++a) {
    const double h2 = grid.spacing()[a] * grid.spacing()[a];
    const int k = la::sym_index(a, a, d);
    if (order == 2) {
      for (std::size_t p = 0; p < n; ++p)
        out.v[p * ns + k] =
            (f.v[grid.shift(p, a, 1)] - 2.0 * f.v[p] + f.v[grid.shift(p, a, -1)]) / h2;
    } else {
      for (std::size_t p = 0; p < n; ++p)
        out.v[p * ns + k] = (-f.v[grid.shift(p, a, 2)] + 16.0 * f.v[grid.shift(p, a, 1)] -
                             30.0 * f.v[p] + 16.0 * f.v[grid.shift(p, a, -1)] -
                             f.v[grid.shift(p, a, -2)]) /
                            (12.0 * h2);
    }
  }
  // Mixed entries by nested central differences; symmetric by construction
  // since the shift operators commute.
  if (d > 1) {
    std::vector<double> da(n), dab(n);
    for (int a = 0; a < d; ++a) {
      fd_axis_derivative(grid, f.v, 1, a, order, da);
      for (int b = a + 1; b < d; ++b) {
        fd_axis_derivative(grid, da, 1, b, order, dab);
        const int k = la::sym_index(a, b, d);
        for (std::size_t p = 0; p < n; ++p) out.v[p * ns + k] = dab[p];
      }
    }
  }
  return out;
}

ChristoffelField metric_christoffels(const SymMatrixField& g, int order) {
  const PeriodicGrid& grid = *g.grid;
  const int d = grid.dim();
  const int ns = g.nsym();
  const std::size_t n = grid.npoints();

  // dg[axis][sym component] over all points.
  std::vector<std::vector<double>> dg(static_cast<std::size_t>(d) * ns, std::vector<double>(n));
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < ns; ++c)
      fd_axis_derivative(grid, std::span<const double>(g.v.data() + c, g.v.size() - c), ns, a,
                         order, dg[static_cast<std::size_t>(a) * ns + c]);

  ChristoffelField out(grid);
  std::vector<double> L(static_cast<std::size_t>(d) * d), ginv(ns), rhs(d);
  std::vector<double> evals(d);
  for (std::size_t p = 0; p < n; ++p) {
    if (!la::cholesky(g.at(p), d, L))
      throw SingularMetric("metric_christoffels: pointwise metric not SPD");
    la::sym_eigenvalues(g.at(p), d, evals);
    if (!(evals[0] > 0.0) || evals[d - 1] / evals[0] > 1e12)
      throw SingularMetric("metric_christoffels: condition number above 1e12");
    la::chol_inverse(L, d, ginv);
    auto dgp = [&](int a, int i, int j) {
      return dg[static_cast<std::size_t>(a) * ns + la::sym_index(i, j, d)][p];
    };
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        for (int l = 0; l < d; ++l) rhs[l] = 0.5 * (dgp(i, j, l) + dgp(j, i, l) - dgp(l, i, j));
        for (int k = 0; k < d; ++k) {
          double s = 0.0;
          for (int l = 0; l < d; ++l) s += ginv[la::sym_index(k, l, d)] * rhs[l];
          out.v[(p * d + k) * ns + la::sym_index(i, j, d)] = s;
        }
      }
    }
  }
  return out;
}

SymMatrixField covariant_hessian(const ScalarField& u, const ChristoffelField& gamma,
                                 int order) {
  const PeriodicGrid& grid = *u.grid;
  const int d = grid.dim();
  SymMatrixField hess = fd_hessian(u, order);
  VectorField du = fd_gradient(u, order);
  const int ns = hess.nsym();
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += gamma.gamma(p, k, i, j) * du.v[p * d + k];
        hess.v[p * ns + la::sym_index(i, j, d)] -= s;
      }
  }
  return hess;
}

double integrate(const ScalarField& f, const ScalarField& weight) {
  if (f.grid != weight.grid) throw std::invalid_argument("integrate: grid mismatch");
  double s = 0.0;
  for (std::size_t p = 0; p < f.v.size(); ++p) s += f.v[p] * weight.v[p];
  return s * f.grid->cell_volume();
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s * f.grid->cell_volume();
}

}  // namespace imcf
