#include "imcf/spacetime.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "imcf/errors.hpp"
#include "imcf/util.hpp"

namespace imcf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}
}  // namespace

void SpacetimeModel::require_inside(double x0) const {
  if (!contains(x0))
    throw DomainError(name + ": x0 = " + fmt(x0) + " outside (" + fmt(x0_min) + ", " +
                      fmt(x0_max) + ")");
}

ChristoffelTime christoffel_time(const SpacetimeModel& model, double x0,
                                 std::span<const double> x) {
  model.require_inside(x0);
  const int d = model.d;
  const int ns = model.nsym();
  ChristoffelTime out;
  out.g00i.resize(d);
  out.g0ij.resize(ns);
  double psidot;
  std::vector<double> psigrad(d), sig(ns), sigdot(ns);
  model.dpsi(x0, x, psidot, psigrad);
  model.sigma(x0, x, sig);
  model.dsigma0(x0, x, sigdot);
  out.g000 = psidot;
  for (int i = 0; i < d; ++i) out.g00i[i] = psigrad[i];
  for (int c = 0; c < ns; ++c) out.g0ij[c] = 0.5 * sigdot[c] + psidot * sig[c];
  return out;
}

SliceGeometry slice_geometry(const SpacetimeModel& model, double x0,
                             std::span<const double> x) {
  model.require_inside(x0);
  const int d = model.d;
  const int ns = model.nsym();
  double psidot;
  std::vector<double> psigrad(d), sig(ns), sigdot(ns);
  model.dpsi(x0, x, psidot, psigrad);
  model.sigma(x0, x, sig);
  model.dsigma0(x0, x, sigdot);

  SliceGeometry out;
  out.conf = std::exp(model.psi(x0, x));
  out.hbar.resize(ns);
  for (int c = 0; c < ns; ++c)
    out.hbar[c] = out.conf * (-0.5 * sigdot[c] - psidot * sig[c]);

  std::vector<double> L(static_cast<std::size_t>(d) * d), siginv(ns);
  if (!la::cholesky(sig, d, L))
    throw SingularMetric(model.name + ": sigma not positive definite at x0 = " + fmt(x0));
  la::chol_inverse(L, d, siginv);
  // Hbar = gbar^{ij} hbar_ij with gbar_ij = e^{2psi} sigma_ij.
  double tr = 0.0;
  for (int i = 0; i < d; ++i) {
    tr += siginv[la::sym_index(i, i, d)] * out.hbar[la::sym_index(i, i, d)];
    for (int j = i + 1; j < d; ++j)
      tr += 2.0 * siginv[la::sym_index(i, j, d)] * out.hbar[la::sym_index(i, j, d)];
  }
  out.Hbar = tr / (out.conf * out.conf);
  return out;
}

double reference_norm(const SpacetimeModel& model, double x0,
                      std::span<const double> x, std::span<const double> eta) {
  model.require_inside(x0);
  const int d = model.d;
  std::vector<double> sig(model.nsym());
  model.sigma(x0, x, sig);
  double q = eta[0] * eta[0] + la::sym_quad(sig, d, eta.subspan(1));
  return std::exp(model.psi(x0, x)) * std::sqrt(q);
}

namespace {

// Full (d+1)x(d+1) ambient metric at y = (x0, x), row-major.
void ambient_metric(const SpacetimeModel& model, std::span<const double> y,
                    std::span<double> gfull) {
  const int d = model.d;
  const int D = d + 1;
  std::vector<double> sig(model.nsym());
  double e2psi = std::exp(2.0 * model.psi(y[0], y.subspan(1)));
  model.sigma(y[0], y.subspan(1), sig);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) gfull[static_cast<std::size_t>(a) * D + b] = 0.0;
  gfull[0] = -e2psi;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      gfull[static_cast<std::size_t>(i + 1) * D + (j + 1)] = e2psi * sig[la::sym_index(i, j, d)];
}

// Gamma^a_{bc} at y by central differences of the metric; Gam[(a*D+b)*D+c].
void ambient_christoffel_fd(const SpacetimeModel& model, std::span<const double> y,
                            double h, std::span<double> Gam) {
  const int D = model.d + 1;
  const std::size_t DD = static_cast<std::size_t>(D) * D;
  std::vector<double> gc(DD), gp(DD), gm(DD), ginv(DD), yp(y.begin(), y.end());
  std::vector<double> dg(static_cast<std::size_t>(D) * DD);
  ambient_metric(model, y, gc);
  for (int c = 0; c < D; ++c) {
    yp[c] = y[c] + h;
    ambient_metric(model, yp, gp);
    yp[c] = y[c] - h;
    ambient_metric(model, yp, gm);
    yp[c] = y[c];
    for (std::size_t k = 0; k < DD; ++k) dg[c * DD + k] = (gp[k] - gm[k]) / (2.0 * h);
  }
  if (!la::invert_general(gc, D, ginv))
    throw SingularMetric(model.name + ": ambient metric singular");
  auto dgat = [&](int c, int a, int b) { return dg[static_cast<std::size_t>(c) * DD + static_cast<std::size_t>(a) * D + b]; };
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int c = 0; c < D; ++c) {
        double s = 0.0;
        for (int e = 0; e < D; ++e)
          s += ginv[static_cast<std::size_t>(a) * D + e] *
               (dgat(b, e, c) + dgat(c, e, b) - dgat(e, b, c));
        Gam[(static_cast<std::size_t>(a) * D + b) * D + c] = 0.5 * s;
      }
}

double timelike_norm2(const SpacetimeModel& model, double x0, std::span<const double> x,
                      std::span<const double> nu) {
  std::vector<double> sig(model.nsym());
  model.sigma(x0, x, sig);
  double e2psi = std::exp(2.0 * model.psi(x0, x));
  return e2psi * (-nu[0] * nu[0] + la::sym_quad(sig, model.d, nu.subspan(1)));
}

}  // namespace

double ambient_ricci_contraction_fd(const SpacetimeModel& model, double x0,
                                    std::span<const double> x, std::span<const double> nu) {
  const int d = model.d;
  const int D = d + 1;
  const double h = model.curvature_fd_step;
  if (!(x0 - 2.0 * h > model.x0_min && x0 + 2.0 * h < model.x0_max))
    throw DomainError(model.name + ": curvature stencil leaves the domain at x0 = " + fmt(x0));

  const std::size_t G = static_cast<std::size_t>(D) * D * D;
  std::vector<double> Gc(G), Gp(G), Gm(G), dG(static_cast<std::size_t>(D) * G);
  std::vector<double> y(D);
  y[0] = x0;
  for (int i = 0; i < d; ++i) y[i + 1] = x[i];
  ambient_christoffel_fd(model, y, h, Gc);
  std::vector<double> yp(y);
  for (int c = 0; c < D; ++c) {
    yp[c] = y[c] + h;
    ambient_christoffel_fd(model, yp, h, Gp);
    yp[c] = y[c] - h;
    ambient_christoffel_fd(model, yp, h, Gm);
    yp[c] = y[c];
    for (std::size_t k = 0; k < G; ++k) dG[c * G + k] = (Gp[k] - Gm[k]) / (2.0 * h);
  }
  auto gam = [&](int a, int b, int c) { return Gc[(static_cast<std::size_t>(a) * D + b) * D + c]; };
  auto dgam = [&](int e, int a, int b, int c) {
    return dG[static_cast<std::size_t>(e) * G + (static_cast<std::size_t>(a) * D + b) * D + c];
  };
  // R_{bc} = d_a Gam^a_{bc} - d_c Gam^a_{ba} + Gam^a_{al} Gam^l_{bc}
  //          - Gam^a_{cl} Gam^l_{ba}.
  double out = 0.0;
  for (int b = 0; b < D; ++b)
    for (int c = 0; c < D; ++c) {
      double r = 0.0;
      for (int a = 0; a < D; ++a) {
        r += dgam(a, a, b, c) - dgam(c, a, b, a);
        for (int l = 0; l < D; ++l) r += gam(a, a, l) * gam(l, b, c) - gam(a, c, l) * gam(l, b, a);
      }
      out += r * nu[b] * nu[c];
    }
  return out;
}

double ambient_ricci_contraction(const SpacetimeModel& model, double x0,
                                 std::span<const double> x, std::span<const double> nu) {
  model.require_inside(x0);
  if (timelike_norm2(model, x0, x, nu) >= 0.0)
    throw NotTimelike(model.name + ": nu is not timelike");
  if (model.ricci_nu_nu) return model.ricci_nu_nu(x0, x, nu);
  return ambient_ricci_contraction_fd(model, x0, x, nu);
}

SpacetimeModel make_minkowski_slab(int d, double x0_min, double x0_max,
                                   std::vector<double> periods) {
  if (periods.empty()) periods.assign(d, 2.0 * M_PI);
  SpacetimeModel m;
  m.name = "minkowski";
  m.d = d;
  m.x0_min = x0_min;
  m.x0_max = x0_max;
  double span = x0_max - x0_min;
  m.sample_x0_min = x0_min + 0.05 * span;
  m.sample_x0_max = x0_max - 0.05 * span;
  m.periods = std::move(periods);
  m.spatially_homogeneous = true;
  const int ns = la::sym_size(d);
  m.psi = [](double, std::span<const double>) { return 0.0; };
  m.dpsi = [d](double, std::span<const double>, double& pd, std::span<double> pg) {
    pd = 0.0;
    for (int i = 0; i < d; ++i) pg[i] = 0.0;
  };
  m.sigma = [d, ns](double, std::span<const double>, std::span<double> s) {
    for (int c = 0; c < ns; ++c) s[c] = 0.0;
    for (int i = 0; i < d; ++i) s[la::sym_index(i, i, d)] = 1.0;
  };
  m.dsigma0 = [ns](double, std::span<const double>, std::span<double> s) {
    for (int c = 0; c < ns; ++c) s[c] = 0.0;
  };
  m.dsigmak = [d, ns](double, std::span<const double>, std::span<double> s) {
    for (int c = 0; c < d * ns; ++c) s[c] = 0.0;
  };
  m.ricci_nu_nu = [](double, std::span<const double>, std::span<const double>) { return 0.0; };
  return m;
}

SpacetimeModel make_exprw(double lambda, int d, std::vector<double> periods) {
  if (periods.empty()) periods.assign(d, 2.0 * M_PI);
  SpacetimeModel m;
  m.name = "exprw";
  m.d = d;
  m.x0_min = -kInf;
  m.x0_max = kInf;
  m.sample_x0_min = -1.0;
  m.sample_x0_max = 4.0;
  m.periods = std::move(periods);
  m.spatially_homogeneous = true;
  const int ns = la::sym_size(d);
  m.psi = [lambda](double x0, std::span<const double>) { return -lambda * x0; };
  m.dpsi = [lambda, d](double, std::span<const double>, double& pd, std::span<double> pg) {
    pd = -lambda;
    for (int i = 0; i < d; ++i) pg[i] = 0.0;
  };
  m.sigma = [d, ns](double, std::span<const double>, std::span<double> s) {
    for (int c = 0; c < ns; ++c) s[c] = 0.0;
    for (int i = 0; i < d; ++i) s[la::sym_index(i, i, d)] = 1.0;
  };
  m.dsigma0 = [ns](double, std::span<const double>, std::span<double> s) {
    for (int c = 0; c < ns; ++c) s[c] = 0.0;
  };
  m.dsigmak = [d, ns](double, std::span<const double>, std::span<double> s) {
    for (int c = 0; c < d * ns; ++c) s[c] = 0.0;
  };
  // Conformally flat with psi linear in x^0: R_00 = 0 and
  // R_ij = (d-1) lambda^2 delta_ij in coordinate components.
  m.ricci_nu_nu = [lambda, d](double, std::span<const double>, std::span<const double> nu) {
    double s = 0.0;
    for (int i = 1; i <= d; ++i) s += nu[i] * nu[i];
    return (d - 1) * lambda * lambda * s;
  };
  return m;
}

SpacetimeModel make_sads_interior(int n, double Lambda, double m_param, int kappa) {
  if (n < 1) throw UnsupportedTopology("make_sads_interior: n must be >= 1");
  if (n > 1)
    throw UnsupportedTopology(
        "make_sads_interior: n > 1 needs a sphere atlas; the grid-global build supports n = 1 only");
  if (kappa != 0)
    throw UnsupportedTopology("make_sads_interior: n = 1 requires a flat spaceform (kappa = 0)");
  if (!(m_param > 0.0)) throw NoHorizon("make_sads_interior: m must be positive");

  // ftilde = -f with f = kappa - 2 Lambda r^2 / (n(n+1)) - m r^{-(n-1)}.
  // For n = 1, kappa = 0: ftilde(r) = Lambda r^2 + m.
  auto ftilde = [Lambda, m_param](double r) { return Lambda * r * r + m_param; };
  auto dftilde = [Lambda](double r) { return 2.0 * Lambda * r; };
  if (!(Lambda < 0.0)) throw NoHorizon("make_sads_interior: f has no positive root (need Lambda < 0)");
  const double r0 = std::sqrt(-m_param / Lambda);
  const double eps = 1e-3 * r0;

  SpacetimeModel m;
  m.name = "sads";
  m.d = n + 1;
  m.x0_min = eps;
  m.x0_max = r0 - eps;
  m.sample_x0_min = m.x0_min + 0.01 * r0;
  m.sample_x0_max = m.x0_max - 0.01 * r0;
  m.periods = {2.0 * M_PI, 2.0 * M_PI};
  m.spatially_homogeneous = true;
  m.curvature_fd_step = 1e-3 * r0;
  const int d = m.d;
  const int ns = la::sym_size(d);

  // Future-directed x^0 = r0 - r; d/dx^0 = -d/dr. psi = -log(ftilde)/2,
  // sigma = diag(ftilde^2, ftilde r^2).
  auto rof = [r0](double x0) { return r0 - x0; };
  m.psi = [ftilde, rof](double x0, std::span<const double>) {
    return -0.5 * std::log(ftilde(rof(x0)));
  };
  m.dpsi = [ftilde, dftilde, rof, d](double x0, std::span<const double>, double& pd,
                                     std::span<double> pg) {
    double r = rof(x0);
    pd = 0.5 * dftilde(r) / ftilde(r);  // -d/dr of (-log ftilde / 2)
    for (int i = 0; i < d; ++i) pg[i] = 0.0;
  };
  m.sigma = [ftilde, rof, d, ns](double x0, std::span<const double>, std::span<double> s) {
    double r = rof(x0);
    double f = ftilde(r);
    for (int c = 0; c < ns; ++c) s[c] = 0.0;
    s[la::sym_index(0, 0, d)] = f * f;
    s[la::sym_index(1, 1, d)] = f * r * r;
  };
  m.dsigma0 = [ftilde, dftilde, rof, d, ns](double x0, std::span<const double>,
                                            std::span<double> s) {
    double r = rof(x0);
    double f = ftilde(r), fp = dftilde(r);
    for (int c = 0; c < ns; ++c) s[c] = 0.0;
    s[la::sym_index(0, 0, d)] = -2.0 * f * fp;          // -d/dr (f^2)
    s[la::sym_index(1, 1, d)] = -(fp * r * r + 2.0 * f * r);
  };
  m.dsigmak = [d, ns](double, std::span<const double>, std::span<double> s) {
    for (int c = 0; c < d * ns; ++c) s[c] = 0.0;
  };
  // Einstein space: R_ab = (2/n) Lambda gbar_ab.
  const double two_over_n_Lambda = 2.0 * Lambda / n;
  SpacetimeModel* self = nullptr;  // captured via copy of the needed pieces instead
  auto psi_copy = m.psi;
  auto sigma_copy = m.sigma;
  m.ricci_nu_nu = [two_over_n_Lambda, psi_copy, sigma_copy, d, ns](
                      double x0, std::span<const double> x, std::span<const double> nu) {
    std::vector<double> sig(ns);
    sigma_copy(x0, x, sig);
    double e2psi = std::exp(2.0 * psi_copy(x0, x));
    double norm2 = e2psi * (-nu[0] * nu[0] + la::sym_quad(sig, d, nu.subspan(1)));
    return two_over_n_Lambda * norm2;
  };
  (void)self;
  return m;
}

SpacetimeModel reparameterize(const SpacetimeModel& model,
                              std::function<double(double)> phi, double tau0, double b) {
  if (b < 0.0) b = model.x0_max;
  if (!std::isfinite(b)) b = tau0 + 50.0;  // finite cap for half-infinite ranges
  if (!(b > tau0)) throw RangeError("reparameterize: empty interval");
  if (!(tau0 >= model.x0_min && b <= model.x0_max))
    throw DomainError("reparameterize: [tau0, b] not inside the model's time range");

  const int kNodes = 4096;
  // Positivity and barrier checks at the quadrature nodes; a few fixed
  // spatial probes stand in for the inf over the (periodic) slice.
  std::vector<std::vector<double>> probes;
  for (double frac : {0.0, 0.25, 0.5, 0.75}) {
    std::vector<double> x(model.d);
    for (int i = 0; i < model.d; ++i) x[i] = frac * model.periods[i];
    probes.push_back(std::move(x));
  }
  const double htau = (b - tau0) / kNodes;
  for (int k = 0; k <= kNodes; ++k) {
    double tau = tau0 + k * htau;
    if (!model.contains(tau)) continue;
    double p = phi(tau);
    if (!(p > 0.0)) throw NotPositive("reparameterize: phi <= 0 at tau = " + fmt(tau));
    for (const auto& x : probes) {
      SliceGeometry sg = slice_geometry(model, tau, x);
      if (sg.conf * sg.Hbar < p - 1e-10)
        throw BarrierViolated("reparameterize: e^psi Hbar < phi at tau = " + fmt(tau));
    }
  }

  // xt^0(tau) by cumulative Simpson; inverse by monotone cubic interpolation.
  std::vector<double> taus(kNodes + 1);
  for (int k = 0; k <= kNodes; ++k) taus[k] = tau0 + k * htau;
  std::vector<double> xt = cumulative_simpson(phi, tau0, b, kNodes);
  auto inverse = std::make_shared<MonotoneCubic>(xt, taus);

  const double phi_h = 1e-6 * (b - tau0);  // step for phi' by central differences
  auto dphi = [phi, phi_h](double tau) {
    return (phi(tau + phi_h) - phi(tau - phi_h)) / (2.0 * phi_h);
  };

  SpacetimeModel base = model;  // full copy keeps the wrapped callables self-contained
  SpacetimeModel w;
  w.name = model.name + "_reparam";
  w.d = model.d;
  w.x0_min = 0.0;
  w.x0_max = xt.back();
  w.sample_x0_min = 1e-3 * xt.back();
  w.sample_x0_max = (1.0 - 1e-3) * xt.back();
  w.periods = model.periods;
  w.spatially_homogeneous = model.spatially_homogeneous;
  w.curvature_fd_step = model.curvature_fd_step;
  const int d = w.d;
  const int ns = la::sym_size(d);

  auto tau_of = [inverse](double xt0) { return (*inverse)(xt0); };

  // e^{2 psit} = e^{2 psi} / phi^2 and sigmat = phi^2 sigma: rewriting
  // e^{2psi}(-(dx^0)^2 + sigma dx dx) in the xt^0 coordinate scales both the
  // conformal factor and the spatial block.
  w.psi = [base, phi, tau_of](double xt0, std::span<const double> x) {
    double tau = tau_of(xt0);
    return base.psi(tau, x) - std::log(phi(tau));
  };
  w.dpsi = [base, phi, dphi, tau_of, d](double xt0, std::span<const double> x, double& pd,
                                        std::span<double> pg) {
    double tau = tau_of(xt0);
    double p = phi(tau);
    double pdot;
    base.dpsi(tau, x, pdot, pg);
    pd = (pdot - dphi(tau) / p) / p;
    (void)d;
  };
  w.sigma = [base, phi, tau_of, ns](double xt0, std::span<const double> x, std::span<double> s) {
    double tau = tau_of(xt0);
    double p2 = phi(tau) * phi(tau);
    base.sigma(tau, x, s);
    for (int c = 0; c < ns; ++c) s[c] *= p2;
  };
  w.dsigma0 = [base, phi, dphi, tau_of, ns](double xt0, std::span<const double> x,
                                            std::span<double> s) {
    double tau = tau_of(xt0);
    double p = phi(tau), pp = dphi(tau);
    std::vector<double> sig(ns);
    base.sigma(tau, x, sig);
    base.dsigma0(tau, x, s);
    // d/dxt^0 (phi^2 sigma) = (1/phi) d/dtau (phi^2 sigma)
    for (int c = 0; c < ns; ++c) s[c] = 2.0 * pp * sig[c] + p * s[c];
  };
  w.dsigmak = [base, phi, tau_of, d, ns](double xt0, std::span<const double> x,
                                         std::span<double> s) {
    double tau = tau_of(xt0);
    double p2 = phi(tau) * phi(tau);
    base.dsigmak(tau, x, s);
    for (int c = 0; c < d * ns; ++c) s[c] *= p2;
  };
  if (base.ricci_nu_nu) {
    // Same manifold; transform nu back to the base coordinates.
    w.ricci_nu_nu = [base, phi, tau_of, d](double xt0, std::span<const double> x,
                                           std::span<const double> nu) {
      double tau = tau_of(xt0);
      std::vector<double> nub(nu.begin(), nu.end());
      nub[0] /= phi(tau);
      (void)d;
      return base.ricci_nu_nu(tau, x, nub);
    };
  }
  return w;
}

}  // namespace imcf
