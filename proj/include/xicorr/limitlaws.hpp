#pragma once

#include <cstddef>

#include "xicorr/rational.hpp"

namespace xicorr {

/// Semicircle law W(u, r): density 2/(pi r^2) sqrt(r^2 - (x-u)^2) on [u-r, u+r].
struct SemicircleLaw {
  double u;
  double r;

  /// Limit law of the symmetrized xi matrix at ratio gamma = p/n: W(1, 2 sqrt(gamma/5)).
  static SemicircleLaw for_phi(double gamma);

  double pdf(double x) const;
  double cdf(double x) const;
  /// E[(X - u)^order]: zero for odd order, C_m (r/2)^{2m} for order 2m. order <= 40.
  double central_moment(unsigned order) const;
};

/// Marchenko-Pastur law MP(y, sigma2).
struct MPLaw {
  double y;
  double sigma2;

  /// Limit law of the Gram xi matrix at ratio gamma = p/n: MP(1, 2 gamma / 5).
  static MPLaw for_psi(double gamma);

  double lower_edge() const;  // sigma2 (1 - sqrt y)^2
  double upper_edge() const;  // sigma2 (1 + sqrt y)^2
  /// Mass of the atom at zero: 1 - 1/y when y > 1, else 0.
  double atom() const;
  /// Density of the continuous part.
  double pdf(double x) const;
  /// Adaptive Simpson integral of the continuous part (abs tol 1e-9) plus the atom.
  double cdf(double x) const;
  /// sigma2^k sum_{r<k} y^r/(r+1) C(k,r) C(k-1,r). k <= 20.
  double moment(unsigned k) const;
};

/// Cov(G_k1, G_k2) of the Gaussian limit of {tr(Psi^k) - E tr(Psi^k)} at ratio gamma.
/// Throws RangeExceeded unless 1 <= k1, k2 <= 12.
double lss_cov(double gamma, unsigned k1, unsigned k2);
/// The bracketed combinatorial factor of lss_cov, exact (no (2 gamma/5) power).
Rational lss_cov_bracket(unsigned k1, unsigned k2);

/// E tr(Psi_n) = p(p-1)(n-2)(4n-7) / (10 (n-1)^2 (n+1)); requires n >= 3.
Rational exact_mean_tr_psi(std::size_t n, std::size_t p);
/// Var(sqrt(n) Xi_ij) under independence.
Rational exact_var_sqrtn_xi(std::size_t n);
/// E[Xi_ij^2] under independence.
Rational exact_mean_xi_sq(std::size_t n);
/// Var(Xi_ij^2) under independence.
Rational exact_var_xi_sq(std::size_t n);

/// (2m)! / (m! (m+1)!); RangeExceeded for m > 30.
BigInt catalan(unsigned m);
/// Number of m-tuples of Catalan numbers with indices summing to n:
/// m/(2n+m) binom(2n+m, n). RangeExceeded for n or m > 30, or m = 0.
BigInt catalan_convolution(unsigned n, unsigned m);

/// Standard normal CDF and its inverse (inverse accurate to ~1e-9 absolute).
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace xicorr
