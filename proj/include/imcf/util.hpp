#pragma once

// Seeded sampling, monotone interpolation, and quadrature helpers shared by
// the checkers and the reparameterization machinery.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace imcf {

// Deterministic uniform/normal sampler. Double conversion is hand-rolled so
// that outputs do not depend on the standard library's distribution details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    // Box-Muller; one value per call keeps the stream simple to reason about.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

// Monotone cubic (Fritsch-Carlson) interpolant through strictly monotone data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;  // nodes, values, node slopes
};

// Composite Simpson with midpoints on n subintervals of [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int n);

// Cumulative Simpson at the n+1 nodes of a uniform partition of [a, b].
std::vector<double> cumulative_simpson(const std::function<double(double)>& f,
                                       double a, double b, int n);

// Adaptive Simpson to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

// FNV-1a over bytes; used for config hashes in output headers.
std::uint64_t fnv1a(std::span<const char> bytes, std::uint64_t h = 1469598103934665603ULL);

}  // namespace imcf
