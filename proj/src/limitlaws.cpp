#include "xicorr/limitlaws.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "xicorr/error.hpp"

namespace xicorr {
namespace {

using std::numbers::pi;

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace

BigInt binomial(unsigned n, unsigned k) {
  BigInt result;
  mpz_bin_uiui(result.get_mpz_t(), n, k);
  return result;
}

// ---------------------------------------------------------------------------
// Semicircle

SemicircleLaw SemicircleLaw::for_phi(double gamma) { return {1.0, 2.0 * std::sqrt(gamma / 5.0)}; }

double SemicircleLaw::pdf(double x) const {
  const double d = x - u;
  if (std::abs(d) >= r) return 0.0;
  return 2.0 / (pi * r * r) * std::sqrt(r * r - d * d);
}

double SemicircleLaw::cdf(double x) const {
  const double t = (x - u) / r;
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / pi;
}

double SemicircleLaw::central_moment(unsigned order) const {
  if (order > 40) throw Error(ErrorCode::RangeExceeded, "semicircle moment order > 40");
  if (order % 2 == 1) return 0.0;
  const unsigned m = order / 2;
  return catalan(m).get_d() * std::pow(r / 2.0, static_cast<int>(order));
}

// ---------------------------------------------------------------------------
// Marchenko-Pastur

MPLaw MPLaw::for_psi(double gamma) { return {1.0, 2.0 * gamma / 5.0}; }

double MPLaw::lower_edge() const {
  const double s = 1.0 - std::sqrt(y);
  return sigma2 * s * s;
}

double MPLaw::upper_edge() const {
  const double s = 1.0 + std::sqrt(y);
  return sigma2 * s * s;
}

double MPLaw::atom() const { return y > 1.0 ? 1.0 - 1.0 / y : 0.0; }

double MPLaw::pdf(double x) const {
  const double a = lower_edge();
  const double b = upper_edge();
  if (x < a || x > b) return 0.0;
  if (x <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(0.0, (b - x) * (x - a))) / (2.0 * pi * x * y * sigma2);
}

double MPLaw::cdf(double x) const {
  const double a = lower_edge();
  const double b = upper_edge();
  double mass = x >= 0.0 ? atom() : 0.0;
  if (x <= a) return mass;
  if (x >= b) return mass + (1.0 - atom());
  // x = a + (b - a)(1 - cos t)/2 removes the square-root edge behaviour; for
  // a = 0 the 1/x pole cancels against sin^2 t / (1 - cos t) = 1 + cos t.
  const double half = 0.5 * (b - a);
  const double norm = 2.0 * pi * y * sigma2;
  auto integrand = [&](double t) {
    const double s = std::sin(t);
    const double c = std::cos(t);
    if (a <= 0.0) return half * half * (1.0 + c) / (half * norm);
    return half * half * s * s / (norm * (a + half * (1.0 - c)));
  };
  const double upper = std::acos(std::clamp(1.0 - (x - a) / half, -1.0, 1.0));
  return mass + integrate(integrand, 0.0, upper, 1e-9);
}

double MPLaw::moment(unsigned k) const {
  if (k > 20) throw Error(ErrorCode::RangeExceeded, "MP moment order > 20");
  if (k == 0) return 1.0;
  double total = 0.0;
  for (unsigned r = 0; r < k; ++r) {
    const Rational coef = make_rational(binomial(k, r) * binomial(k - 1, r), r + 1);
    total += coef.get_d() * std::pow(y, static_cast<int>(r));
  }
  return std::pow(sigma2, static_cast<int>(k)) * total;
}

// ---------------------------------------------------------------------------
// LSS covariance

namespace {

// sum_{l=0}^{k-t} C(2k-2l-1, k-l-t) C(2l+1, l+1) / (2k-2l-1)
Rational cycle_tree_sum(unsigned k, unsigned t) {
  Rational sum = 0;
  for (unsigned l = 0; l + t <= k; ++l) {
    const unsigned top = 2 * k - 2 * l - 1;
    sum += make_rational(binomial(top, k - l - t) * binomial(2 * l + 1, l + 1), top);
  }
  return sum;
}

}  // namespace

Rational lss_cov_bracket(unsigned k1, unsigned k2) {
  if (k1 < 1 || k2 < 1 || k1 > 12 || k2 > 12)
    throw Error(ErrorCode::RangeExceeded, "lss_cov needs 1 <= k1, k2 <= 12");
  Rational total = 2 * Rational(binomial(2 * k1, k1 + 1) * binomial(2 * k2, k2 + 1));
  const unsigned tmax = std::min(k1, k2);
  for (unsigned t = 2; t <= tmax; ++t) {
    const Rational weight = t * (2 * t - 1) * (2 * t - 1);
    total += 2 * weight * cycle_tree_sum(k1, t) * cycle_tree_sum(k2, t);
  }
  return total;
}

double lss_cov(double gamma, unsigned k1, unsigned k2) {
  return std::pow(2.0 * gamma / 5.0, static_cast<int>(k1 + k2)) * lss_cov_bracket(k1, k2).get_d();
}

// ---------------------------------------------------------------------------
// Exact finite-n moments

namespace {

void require_n(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "closed forms need n >= 3");
}

}  // namespace

Rational exact_mean_tr_psi(std::size_t n, std::size_t p) {
  require_n(n);
  const BigInt nn = static_cast<unsigned long>(n);
  const BigInt pp = static_cast<unsigned long>(p);
  const BigInt pairs = p == 0 ? BigInt(0) : BigInt(pp * (pp - 1));
  return make_rational(pairs * (nn - 2) * (4 * nn - 7), 10 * (nn - 1) * (nn - 1) * (nn + 1));
}

Rational exact_var_sqrtn_xi(std::size_t n) {
  require_n(n);
  const BigInt nn = static_cast<unsigned long>(n);
  return make_rational(nn * (nn - 2) * (4 * nn - 7), 10 * (nn + 1) * (nn - 1) * (nn - 1));
}

Rational exact_mean_xi_sq(std::size_t n) {
  require_n(n);
  const BigInt nn = static_cast<unsigned long>(n);
  return make_rational((nn - 2) * (4 * nn - 7), 10 * (nn - 1) * (nn - 1) * (nn + 1));
}

Rational exact_var_xi_sq(std::size_t n) {
  require_n(n);
  const BigInt nn = static_cast<unsigned long>(n);
  const BigInt n2 = nn * nn;
  const BigInt n3 = n2 * nn;
  const BigInt n4 = n3 * nn;
  const BigInt n5 = n4 * nn;
  const BigInt num = 224 * n5 - 1792 * n4 + 5051 * n3 - 4969 * n2 - 2458 * nn + 18128;
  const BigInt m1 = nn - 1;
  const BigInt p1 = nn + 1;
  return make_rational(num, 700 * m1 * m1 * m1 * m1 * p1 * p1 * p1);
}

// ---------------------------------------------------------------------------
// Catalan numbers

BigInt catalan(unsigned m) {
  if (m > 30) throw Error(ErrorCode::RangeExceeded, "catalan index > 30");
  return binomial(2 * m, m) / (m + 1);
}

BigInt catalan_convolution(unsigned n, unsigned m) {
  if (n > 30 || m > 30) throw Error(ErrorCode::RangeExceeded, "catalan_convolution arguments > 30");
  if (m == 0) throw Error(ErrorCode::RangeExceeded, "catalan_convolution needs m >= 1");
  // m/(2n+m) C(2n+m, n) is always an integer.
  return m * binomial(2 * n + m, n) / (2 * n + m);
}

// ---------------------------------------------------------------------------
// Normal distribution

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::InvalidArgument, "normal_quantile needs p in [0, 1]");
  }
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace xicorr
