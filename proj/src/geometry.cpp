#include "imcf/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "imcf/errors.hpp"

namespace imcf {

GeometrySnapshot compute_geometry(const SpacetimeModel& model, const PeriodicGrid& grid,
                                  const GraphState& state, const GeometryOptions& opts) {
  const int d = grid.dim();
  const int D = d + 1;
  const int ns = la::sym_size(d);
  const std::size_t n = grid.npoints();

  GeometrySnapshot s;
  s.grid = &grid;
  s.model = &model;
  s.state = state;
  s.state.u.grid = &grid;
  s.fd_order = opts.fd_order;
  s.Du = fd_gradient(s.state.u, opts.fd_order);
  s.v = ScalarField(grid);
  s.vtilde = ScalarField(grid);
  s.g = SymMatrixField(grid);
  s.ginv = SymMatrixField(grid);
  s.sqrtg = ScalarField(grid);
  s.nu.assign(n * D, 0.0);
  s.h = SymMatrixField(grid);
  s.H = ScalarField(grid);
  s.normA2 = ScalarField(grid);

  // First pass: pointwise metric data (needed before the Christoffels of g).
  std::vector<double> x(d), sig(ns), siginv(ns), L(static_cast<std::size_t>(d) * d);
  std::vector<double> ui(d);  // u^i = sigma^{ij} u_j
  std::vector<double> epsi(n);
  for (std::size_t p = 0; p < n; ++p) {
    grid.coords(p, x);
    const double u0 = s.state.u[p];
    if (!model.contains(u0)) {
      std::ostringstream ss;
      ss << "graph leaves the time range: u = " << u0 << " at point " << p;
      throw DomainError(ss.str());
    }
    model.sigma(u0, x, sig);
    if (!la::cholesky(sig, d, L)) throw SingularMetric("compute_geometry: sigma not SPD");
    la::chol_inverse(L, d, siginv);

    auto du = s.Du.at(p);
    la::sym_matvec(siginv, d, du, ui);
    double du2 = 0.0;
    for (int i = 0; i < d; ++i) du2 += ui[i] * du[i];
    double v2 = 1.0 - du2;
    if (v2 <= opts.eps_space) {
      std::ostringstream ss;
      ss << "graph not uniformly spacelike: v^2 = " << v2 << " at point " << p;
      throw NotSpacelike(ss.str());
    }
    double v = std::sqrt(v2);
    s.v[p] = v;
    s.vtilde[p] = 1.0 / v;

    double ep = std::exp(model.psi(u0, x));
    epsi[p] = ep;
    double e2 = ep * ep;
    auto gp = s.g.at(p);
    auto gip = s.ginv.at(p);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        int c = la::sym_index(i, j, d);
        gp[c] = e2 * (sig[c] - du[i] * du[j]);
        gip[c] = (siginv[c] + ui[i] * ui[j] / v2) / e2;
      }
    if (!la::cholesky(gp, d, L))
      throw SingularMetric("compute_geometry: induced metric not SPD");
    s.sqrtg[p] = std::sqrt(la::chol_det(L, d));

    double* nup = s.nu.data() + p * D;
    double c = -1.0 / (v * ep);
    nup[0] = c;
    for (int i = 0; i < d; ++i) nup[i + 1] = c * ui[i];
  }

  // Covariant Hessian of u with respect to the induced metric.
  ChristoffelField gamma = metric_christoffels(s.g, opts.fd_order);
  SymMatrixField uhess = covariant_hessian(s.state.u, gamma, opts.fd_order);

  // Second pass: second fundamental form and curvature scalars.
  std::vector<double> hmix(static_cast<std::size_t>(d) * d);
  for (std::size_t p = 0; p < n; ++p) {
    grid.coords(p, x);
    const double u0 = s.state.u[p];
    ChristoffelTime ct = christoffel_time(model, u0, x);
    auto du = s.Du.at(p);
    auto hp = s.h.at(p);
    auto uh = uhess.at(p);
    const double fac = epsi[p] * s.v[p];
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        int c = la::sym_index(i, j, d);
        hp[c] = fac * (-uh[c] - ct.g000 * du[i] * du[j] - ct.g00i[j] * du[i] -
                       ct.g00i[i] * du[j] - ct.g0ij[c]);
      }
    auto gip = s.ginv.at(p);
    double H = 0.0;
    for (int i = 0; i < d; ++i) {
      H += gip[la::sym_index(i, i, d)] * hp[la::sym_index(i, i, d)];
      for (int j = i + 1; j < d; ++j)
        H += 2.0 * gip[la::sym_index(i, j, d)] * hp[la::sym_index(i, j, d)];
    }
    s.H[p] = H;
    // h^i_j = g^{ik} h_kj; |A|^2 = h^i_j h^j_i.
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double m = 0.0;
        for (int k = 0; k < d; ++k)
          m += gip[la::sym_index(i, k, d)] * hp[la::sym_index(k, j, d)];
        hmix[static_cast<std::size_t>(i) * d + j] = m;
      }
    double a2 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        a2 += hmix[static_cast<std::size_t>(i) * d + j] * hmix[static_cast<std::size_t>(j) * d + i];
    s.normA2[p] = a2;
  }

  s.volume = integrate(s.sqrtg);
  s.H_min = std::numeric_limits<double>::infinity();
  s.H_max = -s.H_min;
  s.vtilde_max = 0.0;
  s.u_min = std::numeric_limits<double>::infinity();
  s.u_max = -s.u_min;
  for (std::size_t p = 0; p < n; ++p) {
    s.H_min = std::min(s.H_min, s.H[p]);
    s.H_max = std::max(s.H_max, s.H[p]);
    s.vtilde_max = std::max(s.vtilde_max, s.vtilde[p]);
    s.u_min = std::min(s.u_min, s.state.u[p]);
    s.u_max = std::max(s.u_max, s.state.u[p]);
  }
  return s;
}

std::pair<double, double> principal_curvature_range(const GeometrySnapshot& snap) {
  const int d = snap.grid->dim();
  std::vector<double> evals(d);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t p = 0; p < snap.grid->npoints(); ++p) {
    la::gen_eigenvalues(snap.h.at(p), snap.g.at(p), d, evals);
    lo = std::min(lo, evals[0]);
    hi = std::max(hi, evals[d - 1]);
  }
  return {lo, hi};
}

double gradient_bound_certificate(const GeometrySnapshot& snap) {
  return snap.vtilde_max;
}

}  // namespace imcf
