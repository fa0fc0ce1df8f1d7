#pragma once

// Dense kernels for small (d <= ~4) symmetric matrices stored in packed
// upper-triangular order: A(i,j) = packed[i*d - i*(i-1)/2 + (j-i)] for i <= j.

#include <cstddef>
#include <span>
#include <vector>

namespace imcf::la {

constexpr int sym_size(int d) { return d * (d + 1) / 2; }

constexpr int sym_index(int i, int j, int d) {
  if (i > j) { int t = i; i = j; j = t; }
  return i * d - i * (i - 1) / 2 + (j - i);
}

// Full row-major view of a packed symmetric matrix.
void sym_to_full(std::span<const double> packed, int d, std::span<double> full);

// y = A x for packed symmetric A.
void sym_matvec(std::span<const double> packed, int d,
                std::span<const double> x, std::span<double> y);

// x^T A x for packed symmetric A.
double sym_quad(std::span<const double> packed, int d, std::span<const double> x);

// Cholesky A = L L^T, L lower triangular row-major (d x d, full storage).
// Returns false if A is not positive definite.
bool cholesky(std::span<const double> packed, int d, std::span<double> L);

// det(A) = prod(L_ii)^2 from a Cholesky factor.
double chol_det(std::span<const double> L, int d);

// Inverse of an SPD matrix from its Cholesky factor, packed output.
void chol_inverse(std::span<const double> L, int d, std::span<double> inv_packed);

// Solve L L^T x = b in place.
void chol_solve(std::span<const double> L, int d, std::span<double> x);

// Eigenvalues of a packed symmetric matrix (cyclic Jacobi), ascending.
void sym_eigenvalues(std::span<const double> packed, int d, std::span<double> evals);

// Eigenvalues of g^{-1} h for SPD g and symmetric h (both packed), ascending.
// Real by the symmetric pencil structure; computed via L^{-1} h L^{-T}.
void gen_eigenvalues(std::span<const double> h_packed, std::span<const double> g_packed,
                     int d, std::span<double> evals);

// General n x n inverse with partial pivoting (row-major full storage).
// Returns false on a singular pivot. Used for the Lorentzian ambient metric.
bool invert_general(std::span<const double> A, int n, std::span<double> Ainv);

}  // namespace imcf::la
