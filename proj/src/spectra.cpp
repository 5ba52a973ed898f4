#include "xicorr/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "xicorr/error.hpp"
#include "xicorr/format.hpp"
#include "xicorr/simd.hpp"

namespace xicorr {
namespace {

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

void require_symmetric(const Matrix& a) {
  if (!a.square()) throw Error(ErrorCode::NotSymmetric, "matrix is not square");
  const double bound = 1e-12 * max_abs(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > bound)
        throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric");
}

// Householder reduction to tridiagonal form. On return d holds the diagonal and
// e[1..n-1] the subdiagonal (e[0] = 0). `a` is overwritten.
void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

// Implicit-shift QL on a symmetric tridiagonal matrix; eigenvalues into d.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n < 2) return;
  constexpr int kMaxIterations = 60;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iterations > kMaxIterations)
        throw Error(ErrorCode::EigenFailure, "QL iteration did not converge");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        e[i + 1] = r = std::hypot(f, g);
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace

SpectralSummary sym_eigenvalues(const Matrix& a, double tol) {
  require_symmetric(a);
  const std::size_t p = a.rows();
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "empty matrix");

  Matrix work = a;
  std::vector<double> d, e;
  tridiagonalize(work, d, e);
  tridiagonal_ql(d, e);
  std::sort(d.begin(), d.end(), std::greater<>());

  double tr = 0.0, frob = 0.0, sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < p; ++i) tr += a(i, i);
  for (double v : a.data()) frob += v * v;
  for (double lambda : d) {
    sum += lambda;
    sum_sq += lambda * lambda;
  }
  const double norm = std::sqrt(frob);
  const double pp = static_cast<double>(p);
  if (std::abs(sum - tr) > tol * pp * std::max(norm, 1e-300) ||
      std::abs(sum_sq - frob) > tol * pp * std::max(frob, 1e-300))
    throw Error(ErrorCode::EigenFailure, "spectrum fails the trace/Frobenius identities");
  return {std::move(d)};
}

SpectralSummary pool(const std::vector<SpectralSummary>& parts) {
  SpectralSummary pooled;
  for (const auto& s : parts)
    pooled.eigenvalues.insert(pooled.eigenvalues.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  std::sort(pooled.eigenvalues.begin(), pooled.eigenvalues.end(), std::greater<>());
  return pooled;
}

double trace_power(const Matrix& a, unsigned k, TracePowerMethod method) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "trace_power: k must be positive");
  if (method == TracePowerMethod::spectral) return trace_power(sym_eigenvalues(a), k);
  require_symmetric(a);
  if (k == 1) return trace(a);
  // tr(A^k) = <A^h, A^(k-h)> with h = k/2, both factors symmetric.
  const unsigned half = k / 2;
  Matrix low = a;
  for (unsigned i = 1; i < half; ++i) low = multiply_symmetric(low, a);
  Matrix high = low;
  if (k % 2 == 1) high = multiply_symmetric(low, a);
  return simd::dot(low.data(), high.data());
}

double trace_power(const SpectralSummary& s, unsigned k) {
  double sum = 0.0;
  for (double lambda : s.eigenvalues) sum += std::pow(lambda, static_cast<int>(k));
  return sum;
}

double esd_cdf(const SpectralSummary& s, double x) {
  if (s.eigenvalues.empty()) return 0.0;
  const auto count = std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(),
                                   [x](double lambda) { return lambda <= x; });
  return static_cast<double>(count) / static_cast<double>(s.eigenvalues.size());
}

double ks_distance(const SpectralSummary& s, const std::function<double(double)>& ref_cdf) {
  std::vector<double> sorted = s.eigenvalues;
  std::sort(sorted.begin(), sorted.end());
  const auto p = static_cast<double>(sorted.size());
  double sup = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    // Left limits on both sides, so a step-function reference is handled too.
    const double ref_at = ref_cdf(sorted[i]);
    const double ref_below = ref_cdf(std::nextafter(sorted[i], -std::numeric_limits<double>::infinity()));
    const double below = static_cast<double>(i) / p;
    const double at = static_cast<double>(j) / p;
    sup = std::max({sup, std::abs(below - ref_below), std::abs(at - ref_at)});
    i = j;
  }
  return sup;
}

HistogramRange default_range(const SpectralSummary& s) {
  if (s.eigenvalues.empty()) return {0.0, 1.0};
  const auto [lo_it, hi_it] = std::minmax_element(s.eigenvalues.begin(), s.eigenvalues.end());
  const double span = *hi_it - *lo_it;
  if (span <= 0.0) return {*lo_it - 0.5, *hi_it + 0.5};
  return {*lo_it - 0.05 * span, *hi_it + 0.05 * span};
}

Histogram histogram(const SpectralSummary& s, std::size_t bins, HistogramRange range) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  if (!(range.lo < range.hi)) throw Error(ErrorCode::InvalidArgument, "histogram range must satisfy lo < hi");
  Histogram h;
  const double width = (range.hi - range.lo) / static_cast<double>(bins);
  h.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.bin_edges[b] = range.lo + width * static_cast<double>(b);
  h.bin_edges.back() = range.hi;

  std::vector<std::size_t> counts(bins, 0);
  for (double x : s.eigenvalues) {
    if (x < range.lo || x > range.hi) ++h.clipped;
    const double pos = std::floor((x - range.lo) / width);
    const auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    ++counts[b];
  }
  h.densities.resize(bins, 0.0);
  const auto total = static_cast<double>(s.eigenvalues.size());
  if (total > 0)
    for (std::size_t b = 0; b < bins; ++b)
      h.densities[b] = static_cast<double>(counts[b]) / (total * (h.bin_edges[b + 1] - h.bin_edges[b]));
  return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,density\n";
  for (std::size_t b = 0; b < h.densities.size(); ++b)
    out << format_double(h.bin_edges[b]) << ',' << format_double(h.bin_edges[b + 1]) << ','
        << format_double(h.densities[b]) << '\n';
}

}  // namespace xicorr
