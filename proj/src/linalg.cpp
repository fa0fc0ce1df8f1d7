#include "imcf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace imcf::la {

void sym_to_full(std::span<const double> packed, int d, std::span<double> full) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      full[static_cast<size_t>(i) * d + j] = packed[sym_index(i, j, d)];
}

void sym_matvec(std::span<const double> packed, int d,
                std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += packed[sym_index(i, j, d)] * x[j];
    y[i] = s;
  }
}

double sym_quad(std::span<const double> packed, int d, std::span<const double> x) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    s += packed[sym_index(i, i, d)] * x[i] * x[i];
    for (int j = i + 1; j < d; ++j) s += 2.0 * packed[sym_index(i, j, d)] * x[i] * x[j];
  }
  return s;
}

bool cholesky(std::span<const double> packed, int d, std::span<double> L) {
  std::fill(L.begin(), L.begin() + static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = packed[sym_index(j, i, d)];
      for (int k = 0; k < j; ++k)
        s -= L[static_cast<size_t>(i) * d + k] * L[static_cast<size_t>(j) * d + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        L[static_cast<size_t>(i) * d + i] = std::sqrt(s);
      } else {
        L[static_cast<size_t>(i) * d + j] = s / L[static_cast<size_t>(j) * d + j];
      }
    }
  }
  return true;
}

double chol_det(std::span<const double> L, int d) {
  double p = 1.0;
  for (int i = 0; i < d; ++i) p *= L[static_cast<size_t>(i) * d + i];
  return p * p;
}

void chol_solve(std::span<const double> L, int d, std::span<double> x) {
  for (int i = 0; i < d; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= L[static_cast<size_t>(i) * d + k] * x[k];
    x[i] = s / L[static_cast<size_t>(i) * d + i];
  }
  for (int i = d - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < d; ++k) s -= L[static_cast<size_t>(k) * d + i] * x[k];
    x[i] = s / L[static_cast<size_t>(i) * d + i];
  }
}

void chol_inverse(std::span<const double> L, int d, std::span<double> inv_packed) {
  std::vector<double> e(d);
  for (int j = 0; j < d; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    chol_solve(L, d, e);
    for (int i = 0; i <= j; ++i) inv_packed[sym_index(i, j, d)] = e[i];
  }
}

namespace {

// Cyclic Jacobi on a full symmetric matrix; eigenvalues only.
void jacobi_eigen(std::vector<double>& a, int n, std::span<double> evals) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[static_cast<size_t>(p) * n + q] * a[static_cast<size_t>(p) * n + q];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a[static_cast<size_t>(p) * n + q];
        if (std::abs(apq) < 1e-300) continue;
        double app = a[static_cast<size_t>(p) * n + p];
        double aqq = a[static_cast<size_t>(q) * n + q];
        double theta = 0.5 * (aqq - app) / apq;
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[static_cast<size_t>(k) * n + p];
          double akq = a[static_cast<size_t>(k) * n + q];
          a[static_cast<size_t>(k) * n + p] = c * akp - s * akq;
          a[static_cast<size_t>(k) * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[static_cast<size_t>(p) * n + k];
          double aqk = a[static_cast<size_t>(q) * n + k];
          a[static_cast<size_t>(p) * n + k] = c * apk - s * aqk;
          a[static_cast<size_t>(q) * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) evals[i] = a[static_cast<size_t>(i) * n + i];
  std::sort(evals.begin(), evals.begin() + n);
}

}  // namespace

void sym_eigenvalues(std::span<const double> packed, int d, std::span<double> evals) {
  if (d == 1) { evals[0] = packed[0]; return; }
  std::vector<double> full(static_cast<size_t>(d) * d);
  sym_to_full(packed, d, full);
  jacobi_eigen(full, d, evals);
}

void gen_eigenvalues(std::span<const double> h_packed, std::span<const double> g_packed,
                     int d, std::span<double> evals) {
  if (d == 1) { evals[0] = h_packed[0] / g_packed[0]; return; }
  std::vector<double> L(static_cast<size_t>(d) * d);
  cholesky(g_packed, d, L);
  // B = L^{-1} H L^{-T}: solve column-wise.
  std::vector<double> H(static_cast<size_t>(d) * d);
  sym_to_full(h_packed, d, H);
  // forward-substitute on rows: X = L^{-1} H
  std::vector<double> X(static_cast<size_t>(d) * d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      double s = H[static_cast<size_t>(i) * d + j];
      for (int k = 0; k < i; ++k) s -= L[static_cast<size_t>(i) * d + k] * X[static_cast<size_t>(k) * d + j];
      X[static_cast<size_t>(i) * d + j] = s / L[static_cast<size_t>(i) * d + i];
    }
  }
  // B = X L^{-T}: B^T = L^{-1} X^T, reuse the same substitution on rows of X^T.
  std::vector<double> B(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double s = X[static_cast<size_t>(i) * d + j];
      for (int k = 0; k < j; ++k) s -= L[static_cast<size_t>(j) * d + k] * B[static_cast<size_t>(i) * d + k];
      B[static_cast<size_t>(i) * d + j] = s / L[static_cast<size_t>(j) * d + j];
    }
  }
  jacobi_eigen(B, d, evals);
}

bool invert_general(std::span<const double> A, int n, std::span<double> Ainv) {
  std::vector<double> a(A.begin(), A.begin() + static_cast<size_t>(n) * n);
  std::fill(Ainv.begin(), Ainv.begin() + static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) Ainv[static_cast<size_t>(i) * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<size_t>(r) * n + col]) > std::abs(a[static_cast<size_t>(piv) * n + col])) piv = r;
    if (std::abs(a[static_cast<size_t>(piv) * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(a[static_cast<size_t>(piv) * n + k], a[static_cast<size_t>(col) * n + k]);
        std::swap(Ainv[static_cast<size_t>(piv) * n + k], Ainv[static_cast<size_t>(col) * n + k]);
      }
    }
    double inv_p = 1.0 / a[static_cast<size_t>(col) * n + col];
    for (int k = 0; k < n; ++k) {
      a[static_cast<size_t>(col) * n + k] *= inv_p;
      Ainv[static_cast<size_t>(col) * n + k] *= inv_p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[static_cast<size_t>(r) * n + col];
      if (f == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        a[static_cast<size_t>(r) * n + k] -= f * a[static_cast<size_t>(col) * n + k];
        Ainv[static_cast<size_t>(r) * n + k] -= f * Ainv[static_cast<size_t>(col) * n + k];
      }
    }
  }
  return true;
}

}  // namespace imcf::la
