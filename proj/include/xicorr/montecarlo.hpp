#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "xicorr/hightest.hpp"
#include "xicorr/matrix.hpp"
#include "xicorr/rankcorr.hpp"
#include "xicorr/rng.hpp"
#include "xicorr/spectra.hpp"

namespace xicorr {

/// Data-generating models: (a) N(0, I); (b) i.i.d. Cauchy; (c) banded Gaussian;
/// (d) moving cubic sums; (e) oscillatory pairs; (f) W-shaped pairs.
enum class ModelId { a, b, c, d, e, f };

char to_char(ModelId id) noexcept;
ModelId parse_model(char c);
bool is_null_model(ModelId id) noexcept;

struct ModelSpec {
  ModelId id = ModelId::a;
  std::size_t n = 0;
  std::size_t p = 0;
  double rho = 0.25;                                      // (c)
  std::size_t band = 4;                                   // (c)
  std::array<double, 4> weights = {0.1, 0.05, 0.02, 0.5};  // (d)
  double noise = 0.1;                                     // (e), (f)

  /// OddDimension for (e)/(f) with odd p; InvalidSample for n < 3 or p < 2.
  void validate() const;
};

double standard_normal(Rng& rng);
double standard_cauchy(Rng& rng);

/// Sigma_ij = rho^|i-j| for |i-j| <= band, else 0.
Matrix banded_covariance(std::size_t p, double rho, std::size_t band);

/// Lower-triangular L with L L^T = sigma (Cholesky, semi-definite pivots zeroed).
/// Throws NotPSD when a pivot is below -1e-10 * max diagonal.
Matrix psd_factor(const Matrix& sigma);

DataMatrix sample_model(const ModelSpec& spec, Rng& rng);

struct SimCell {
  ModelId model;
  std::size_t n;
  std::size_t p;
  Statistic stat;
  std::size_t reps;
  double rejection_rate;
};

struct SimTable {
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::vector<SimCell> cells;

  /// Throws InvalidArgument when the cell is absent.
  double rate(ModelId model, std::size_t n, std::size_t p, Statistic stat) const;
};

struct SimConfig {
  std::vector<ModelId> models;
  std::vector<Statistic> stats{kAllStatistics.begin(), kAllStatistics.end()};
  std::vector<std::pair<std::size_t, std::size_t>> grid;  // (n, p)
  std::size_t reps = 500;
  std::uint64_t seed = 0;
  /// alpha, calibration mode and null replications; mc_seed is derived from `seed`.
  TestConfig test;
  unsigned threads = 0;

  void validate() const;
};

/// Fraction of replications rejecting at test.alpha, per (model, n, p, stat).
SimTable run_table(const SimConfig& config);
/// run_table restricted to the null models (a), (b).
SimTable run_size(const SimConfig& config);
/// run_table restricted to the alternatives (c)-(f).
SimTable run_power(const SimConfig& config);

/// `model,n,p,stat,reps,rejection_rate` with header row.
void write_simtable_csv(std::ostream& out, const SimTable& table);

struct EsdResult {
  CorrelationKind kind;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t reps = 0;
  SpectralSummary pooled;
  Histogram histogram;
  double ks = 0.0;
  /// (center, radius) for phi, (y, sigma2) for psi.
  std::pair<double, double> law;
};

/// Pools the spectra of `reps` null Phi_n (kind phi) or Psi_n (kind psi) matrices
/// and compares them with the semicircle or Marchenko-Pastur limit at gamma = p/n.
EsdResult run_esd(CorrelationKind kind, std::size_t n, std::size_t p, std::size_t reps,
                  std::size_t bins, std::uint64_t seed, unsigned threads = 0);

struct CltSeries {
  unsigned k = 1;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double limit_variance = 0.0;  // lss_cov(k, k) at gamma = p/n
  std::vector<double> draws;    // tr(Psi^k) per replication
  std::vector<double> centered; // draws - mean
};

struct CltResult {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t reps = 0;
  std::vector<CltSeries> series;
};

/// tr(Psi_n^k) over `reps` null replications for every k in k_list. reps >= 200.
CltResult run_clt(std::span<const unsigned> k_list, std::size_t n, std::size_t p, std::size_t reps,
                  std::uint64_t seed, unsigned threads = 0);

/// `k,replication,value` (centered draws) with header row.
void write_clt_csv(std::ostream& out, const CltResult& result);

}  // namespace xicorr
