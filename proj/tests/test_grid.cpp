#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "imcf/errors.hpp"
#include "imcf/grid.hpp"

using namespace imcf;

namespace {
constexpr double kPi = std::numbers::pi;

ScalarField sample(const PeriodicGrid& grid, double (*f)(double)) {
  ScalarField out(grid);
  std::vector<double> x(grid.dim());
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    grid.coords(p, x);
    out[p] = f(x[0]);
  }
  return out;
}
}  // namespace

TEST_CASE("grid indexing and wrapping") {
  PeriodicGrid grid({8, 16}, {2.0 * kPi, 4.0});
  CHECK(grid.dim() == 2);
  CHECK(grid.npoints() == 128);
  CHECK(grid.spacing()[0] == doctest::Approx(2.0 * kPi / 8));
  CHECK(grid.spacing()[1] == doctest::Approx(0.25));
  CHECK(grid.min_spacing() == doctest::Approx(0.25));
  CHECK(grid.cell_volume() == doctest::Approx(2.0 * kPi / 8 * 0.25));

  std::vector<int> idx(2);
  grid.multi_index(17, idx);  // row-major, last axis fastest
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 1);
  std::vector<double> x(2);
  grid.coords(17, x);
  CHECK(x[0] == doctest::Approx(2.0 * kPi / 8));
  CHECK(x[1] == doctest::Approx(0.25));

  CHECK(grid.shift(0, 0, -1) == 7 * 16);  // wraps around axis 0
  CHECK(grid.shift(15, 1, 1) == 0);       // wraps around axis 1
  CHECK(grid.shift(17, 1, 3) == 20);

  CHECK_THROWS_AS(PeriodicGrid({4}, {1.0}), std::invalid_argument);  // N >= 8
}

TEST_CASE("gradient of a constant vanishes exactly") {
  PeriodicGrid grid({16, 8}, {1.0, 1.0});
  ScalarField f(grid, 3.5);
  for (int order : {2, 4}) {
    VectorField df = fd_gradient(f, order);
    for (double val : df.v) CHECK(val == 0.0);
    SymMatrixField d2f = fd_hessian(f, order);
    for (double val : d2f.v) CHECK(val == 0.0);
  }
}

TEST_CASE("gradient of sin x: error bound and refinement factor") {
  // Central differences of sin on N points over [0, 2pi): the exact error is
  // (1 - sin(h)/h) max|cos|, about h^2/6.
  auto max_err = [](int N, int order) {
    PeriodicGrid grid({N}, {2.0 * kPi});
    ScalarField f = sample(grid, [](double x) { return std::sin(x); });
    VectorField df = fd_gradient(f, order);
    double worst = 0.0;
    std::vector<double> x(1);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
      grid.coords(p, x);
      worst = std::max(worst, std::abs(df.at(p)[0] - std::cos(x[0])));
    }
    return worst;
  };
  double e64 = max_err(64, 2);
  double h = 2.0 * kPi / 64;
  CHECK(e64 <= 1.61e-3);  // 1 - sin(h)/h = 1.607e-3 at h = 2 pi / 64
  CHECK(e64 == doctest::Approx(1.0 - std::sin(h) / h).epsilon(1e-10));
  double e128 = max_err(128, 2);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.1));
  // Fourth order: factor 16 per refinement.
  CHECK(max_err(64, 4) / max_err(128, 4) == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("hessian of sin x converges at second order") {
  auto max_err = [](int N) {
    PeriodicGrid grid({N}, {2.0 * kPi});
    ScalarField f = sample(grid, [](double x) { return std::sin(x); });
    SymMatrixField d2f = fd_hessian(f, 2);
    double worst = 0.0;
    std::vector<double> x(1);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
      grid.coords(p, x);
      worst = std::max(worst, std::abs(d2f.at(p)[0] + std::sin(x[0])));
    }
    return worst;
  };
  CHECK(max_err(64) <= 4e-3);
  CHECK(max_err(64) / max_err(128) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("mixed hessian on a product of waves") {
  PeriodicGrid grid({64, 64}, {2.0 * kPi, 2.0 * kPi});
  ScalarField f(grid);
  std::vector<double> x(2);
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    grid.coords(p, x);
    f[p] = std::sin(x[0]) * std::sin(x[1]);
  }
  SymMatrixField d2f = fd_hessian(f, 2);
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    grid.coords(p, x);
    double exact = std::cos(x[0]) * std::cos(x[1]);
    worst = std::max(worst, std::abs(d2f.at(p)[la::sym_index(0, 1, 2)] - exact));
  }
  CHECK(worst <= 1e-2);
}

TEST_CASE("integration is spectrally exact for periodic waves") {
  PeriodicGrid grid({64}, {2.0 * kPi});
  ScalarField f = sample(grid, [](double x) { return std::sin(x) * std::sin(x); });
  CHECK(integrate(f) == doctest::Approx(kPi).epsilon(1e-12));
  ScalarField one(grid, 1.0);
  CHECK(integrate(one) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  ScalarField zero(grid, 0.0);
  CHECK(integrate(f, zero) == 0.0);
  CHECK(integrate(f, one) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("christoffels of a flat metric vanish") {
  PeriodicGrid grid({16, 16}, {1.0, 2.0});
  SymMatrixField g(grid);
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    auto gp = g.at(p);
    gp[la::sym_index(0, 0, 2)] = 1.0;
    gp[la::sym_index(1, 1, 2)] = 2.0;
  }
  ChristoffelField gamma = metric_christoffels(g);
  for (double val : gamma.v) CHECK(val == 0.0);
}

TEST_CASE("christoffel of a 1d conformal metric matches the closed form") {
  // g_11 = a(x)^2 with a = 1 + 0.1 sin x gives Gamma^1_11 = a'/a.
  auto worst_at = [](int N) {
    PeriodicGrid grid({N}, {2.0 * kPi});
    SymMatrixField g(grid);
    std::vector<double> x(1);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
      grid.coords(p, x);
      double a = 1.0 + 0.1 * std::sin(x[0]);
      g.at(p)[0] = a * a;
    }
    ChristoffelField gamma = metric_christoffels(g);
    double worst = 0.0;
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
      grid.coords(p, x);
      double exact = 0.1 * std::cos(x[0]) / (1.0 + 0.1 * std::sin(x[0]));
      worst = std::max(worst, std::abs(gamma.gamma(p, 0, 0, 0) - exact));
    }
    return worst;
  };
  CHECK(worst_at(256) <= 1e-4);
  CHECK(worst_at(128) / worst_at(256) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("covariant hessian subtracts the connection term") {
  // Same conformal metric; for u = sin x the covariant Hessian is
  // u'' - Gamma^1_11 u'.
  PeriodicGrid grid({256}, {2.0 * kPi});
  SymMatrixField g(grid);
  ScalarField u(grid);
  std::vector<double> x(1);
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    grid.coords(p, x);
    double a = 1.0 + 0.1 * std::sin(x[0]);
    g.at(p)[0] = a * a;
    u[p] = std::sin(x[0]);
  }
  ChristoffelField gamma = metric_christoffels(g);
  SymMatrixField hess = covariant_hessian(u, gamma);
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    grid.coords(p, x);
    double a = 1.0 + 0.1 * std::sin(x[0]);
    double G = 0.1 * std::cos(x[0]) / a;
    double exact = -std::sin(x[0]) - G * std::cos(x[0]);
    worst = std::max(worst, std::abs(hess.at(p)[0] - exact));
  }
  CHECK(worst <= 1e-3);

  // Constants are annihilated exactly.
  ScalarField c(grid, 2.0);
  SymMatrixField hc = covariant_hessian(c, gamma);
  for (double val : hc.v) CHECK(val == 0.0);
}

TEST_CASE("degenerate metric is rejected") {
  PeriodicGrid grid({16}, {1.0});
  SymMatrixField g(grid);  // all zero
  CHECK_THROWS_AS(metric_christoffels(g), SingularMetric);
}
