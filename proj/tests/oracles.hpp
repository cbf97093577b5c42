#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerical paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double gaussian_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// E[g(W)] for W = exp(sigma Z - sigma^2/2) by quadrature over Z.
inline double lognormal_expectation(double sigma2, const std::function<double(double)>& g) {
  const double sigma = std::sqrt(sigma2);
  return simpson(
      [&](double z) { return g(std::exp(sigma * z - 0.5 * sigma2)) * gaussian_pdf(z); }, -14.0,
      14.0, 40000);
}

/// Exact E[l_n^k] for the d = 1 cascade with a two-point weight law, by
/// enumerating every assignment of weights to the 2 + 4 + ... + 2^n nodes.
/// Feasible for n <= 3 (14 nodes, 2^14 configurations).
inline double two_point_total_mass_moment(double a, double b, double p, int n, int k) {
  int nodes = 0;
  for (int m = 1; m <= n; ++m) nodes += 1 << m;
  double expectation = 0.0;
  for (std::uint32_t cfg = 0; cfg < (1U << nodes); ++cfg) {
    double prob = 1.0;
    std::vector<double> w(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
      const bool pick_a = (cfg >> i) & 1U;
      w[i] = pick_a ? a : b;
      prob *= pick_a ? p : 1.0 - p;
    }
    // Level m node j lives at offset (2^m - 2) + j; its parent is j / 2.
    double total = 0.0;
    for (int leaf = 0; leaf < (1 << n); ++leaf) {
      double prod = 1.0;
      int j = leaf;
      for (int m = n; m >= 1; --m) {
        prod *= w[static_cast<std::size_t>((1 << m) - 2 + j)];
        j >>= 1;
      }
      total += prod;
    }
    total /= (1 << n);
    expectation += prob * std::pow(total, k);
  }
  return expectation;
}

/// Finite-depth second moment from E[l_n^2] = 2^-d E[W^2] E[l_{n-1}^2] + (1 - 2^-d).
inline double second_moment_recursion(double ew2, int d, int n) {
  const double q = std::ldexp(1.0, -d);
  double x = 1.0;
  for (int i = 0; i < n; ++i) x = q * ew2 * x + (1.0 - q);
  return x;
}

/// Root in [0,1] of c z^2 - (1 + c) z + zeta0 = 0, the inverse of
/// phi(z) = z - c z (z - 1) for a LogNormal with c = sigma^2 / (2 ln 2).
inline double lognormal_phi_inverse(double sigma2, double zeta0) {
  const double c = sigma2 / (2.0 * std::numbers::ln2);
  const double b = 1.0 + c;
  return (b - std::sqrt(b * b - 4.0 * c * zeta0)) / (2.0 * c);
}

}  // namespace oracle
