#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "xicorr/matrix.hpp"

namespace xicorr {

/// Eigenvalues of a symmetric matrix, sorted in descending order.
struct SpectralSummary {
  std::vector<double> eigenvalues;

  std::size_t dimension() const noexcept { return eigenvalues.size(); }
};

/// Full spectrum by Householder tridiagonalization followed by implicit-shift
/// QL. Throws NotSymmetric when |A_ij - A_ji| exceeds 1e-12 * max|A|, and
/// EigenFailure when the QL iteration does not converge.
SpectralSummary sym_eigenvalues(const Matrix& a, double tol = 1e-10);

/// Eigenvalues pooled from several decompositions, sorted descending.
SpectralSummary pool(const std::vector<SpectralSummary>& parts);

enum class TracePowerMethod { product, spectral };

/// tr(A^k), either by repeated multiplication or as sum_i lambda_i^k.
double trace_power(const Matrix& a, unsigned k, TracePowerMethod method = TracePowerMethod::product);
double trace_power(const SpectralSummary& s, unsigned k);

/// (1/p) #{lambda_i <= x}
double esd_cdf(const SpectralSummary& s, double x);

/// sup_x |F^A(x) - ref(x)|, evaluated at each atom from both sides (the left
/// side compares left limits, so a step reference equal to F^A gives 0).
double ks_distance(const SpectralSummary& s, const std::function<double(double)>& ref_cdf);

struct Histogram {
  std::vector<double> bin_edges;   // B + 1, strictly increasing
  std::vector<double> densities;   // B, sum density * width = 1
  std::size_t clipped = 0;         // samples outside [edges.front(), edges.back()]
};

struct HistogramRange {
  double lo;
  double hi;
};

/// [min - 0.05 span, max + 0.05 span]; widened to unit length around a single atom.
HistogramRange default_range(const SpectralSummary& s);

/// Equal-width histogram normalized by the total count. Out-of-range values
/// are counted into the end bins and reported in `clipped`.
Histogram histogram(const SpectralSummary& s, std::size_t bins, HistogramRange range);

/// `bin_lo,bin_hi,density` with header row.
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace xicorr
