#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "xicorr/matrix.hpp"
#include "xicorr/permutation.hpp"
#include "xicorr/rankcorr.hpp"
#include "xicorr/rng.hpp"

namespace xicorr::testing {

inline DataMatrix gaussian_data(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  DataMatrix d(n, p);
  for (std::size_t j = 0; j < p; ++j)
    for (auto& v : d.column(j)) v = rng.normal();
  return d;
}

inline Matrix random_symmetric(std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) a(i, j) = a(j, i) = rng.normal();
  return a;
}

/// Cyclic Jacobi rotations; slow but independent of the production solver.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  return ev;
}

/// O(n^2) Kendall tau from two rank vectors.
inline double naive_kendall(const Permutation& x, const Permutation& y) {
  const std::size_t n = x.size();
  long s = 0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      const long dx = x(i) < x(j) ? 1 : -1;
      const long dy = y(i) < y(j) ? 1 : -1;
      s += dx * dy;
    }
  return 2.0 * static_cast<double>(s) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace xicorr::testing
