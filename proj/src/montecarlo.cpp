#include "xicorr/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include "xicorr/error.hpp"
#include "xicorr/format.hpp"
#include "xicorr/limitlaws.hpp"
#include "xicorr/parallel.hpp"

namespace xicorr {
namespace {

constexpr std::uint64_t kNullTag = 0x6E756C6C63616C31ULL;
constexpr std::uint64_t kCellTag = 0x63656C6C73656564ULL;

std::uint64_t shape_key(std::size_t n, std::size_t p) {
  return splitmix64(static_cast<std::uint64_t>(n)) ^ static_cast<std::uint64_t>(p);
}

std::uint64_t cell_seed(std::uint64_t master, ModelId model, std::size_t n, std::size_t p) {
  return derive_seed(master ^ kCellTag, shape_key(n, p) * 8 + static_cast<std::uint64_t>(model));
}

DataMatrix null_data(std::size_t n, std::size_t p, Rng& rng) {
  DataMatrix data(n, p);
  for (std::size_t j = 0; j < p; ++j)
    for (auto& v : data.column(j)) v = rng.normal();
  return data;
}

SimTable restricted(const SimConfig& config, bool null_models) {
  SimConfig copy = config;
  if (copy.models.empty()) {
    copy.models = null_models ? std::vector<ModelId>{ModelId::a, ModelId::b}
                              : std::vector<ModelId>{ModelId::c, ModelId::d, ModelId::e, ModelId::f};
  }
  for (ModelId m : copy.models) {
    if (is_null_model(m) != null_models)
      throw Error(ErrorCode::InvalidArgument,
                  std::string("model ") + to_char(m) + (null_models ? " is not a null model" : " is a null model"));
  }
  return run_table(copy);
}

}  // namespace

char to_char(ModelId id) noexcept { return static_cast<char>('a' + static_cast<int>(id)); }

ModelId parse_model(char c) {
  if (c < 'a' || c > 'f') throw Error(ErrorCode::InvalidArgument, std::string("unknown model '") + c + "'");
  return static_cast<ModelId>(c - 'a');
}

bool is_null_model(ModelId id) noexcept { return id == ModelId::a || id == ModelId::b; }

void ModelSpec::validate() const {
  if (n < 3 || p < 2) throw Error(ErrorCode::InvalidSample, "models need n >= 3 and p >= 2");
  if ((id == ModelId::e || id == ModelId::f) && p % 2 != 0)
    throw Error(ErrorCode::OddDimension, std::string("model ") + to_char(id) + " needs an even p");
}

double standard_normal(Rng& rng) { return rng.normal(); }
double standard_cauchy(Rng& rng) { return rng.cauchy(); }

Matrix banded_covariance(std::size_t p, double rho, std::size_t band) {
  Matrix sigma(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      if (lag <= band) sigma(i, j) = std::pow(rho, static_cast<double>(lag));
    }
  }
  return sigma;
}

Matrix psd_factor(const Matrix& sigma) {
  const std::size_t p = sigma.rows();
  if (sigma.cols() != p) throw Error(ErrorCode::SizeMismatch, "covariance must be square");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(sigma(i, i)));
  const double tol = 1e-10 * std::max(max_diag, 1.0);

  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double pivot = sigma(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -tol) throw Error(ErrorCode::NotPSD, "covariance matrix is not positive semi-definite");
    if (pivot <= tol) continue;  // zero column
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = sigma(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return l;
}

DataMatrix sample_model(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t p = spec.p;
  DataMatrix x(n, p);
  switch (spec.id) {
    case ModelId::a:
      for (std::size_t j = 0; j < p; ++j)
        for (auto& v : x.column(j)) v = rng.normal();
      break;
    case ModelId::b:
      for (std::size_t j = 0; j < p; ++j)
        for (auto& v : x.column(j)) v = rng.cauchy();
      break;
    case ModelId::c: {
      const Matrix l = psd_factor(banded_covariance(p, spec.rho, spec.band));
      std::vector<double> z(p);
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : z) v = rng.normal();
        for (std::size_t r = 0; r < p; ++r) {
          const std::size_t first = r > spec.band ? r - spec.band : 0;
          double s = 0.0;
          for (std::size_t k = first; k <= r; ++k) s += l(r, k) * z[k];
          x(i, r) = s;
        }
      }
      break;
    }
    case ModelId::d: {
      const auto& w = spec.weights;
      std::vector<double> cubes(p + 2);
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& c : cubes) {
          const double z = rng.normal();
          c = z * z * z;
        }
        for (std::size_t r = 0; r < p; ++r)
          x(i, r) = w[0] * cubes[r] + w[1] * cubes[r + 1] + w[2] * cubes[r + 2] + w[3] * rng.normal();
      }
      break;
    }
    case ModelId::e:
    case ModelId::f: {
      const std::size_t half = p / 2;
      for (std::size_t j = 0; j < half; ++j) {
        auto u = x.column(j);
        auto v = x.column(half + j);
        for (std::size_t i = 0; i < n; ++i) {
          u[i] = rng.normal();
          const double signal = spec.id == ModelId::e
                                    ? std::sin(2.0 * std::numbers::pi * u[i])
                                    : (u[i] < 0.0 ? std::abs(u[i] + 0.5) : std::abs(u[i] - 0.5));
          v[i] = signal + spec.noise * rng.normal();
        }
      }
      break;
    }
  }
  return x;
}

double SimTable::rate(ModelId model, std::size_t n, std::size_t p, Statistic stat) const {
  for (const auto& c : cells)
    if (c.model == model && c.n == n && c.p == p && c.stat == stat) return c.rejection_rate;
  throw Error(ErrorCode::InvalidArgument, "no such cell in the simulation table");
}

void SimConfig::validate() const {
  if (models.empty()) throw Error(ErrorCode::InvalidArgument, "no models requested");
  if (stats.empty()) throw Error(ErrorCode::InvalidArgument, "no statistics requested");
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty (n, p) grid");
  if (reps < 100) throw Error(ErrorCode::InvalidArgument, "simulations need at least 100 replications");
  test.validate();
  for (const auto& [n, p] : grid)
    for (ModelId m : models) ModelSpec{.id = m, .n = n, .p = p}.validate();
}

SimTable run_table(const SimConfig& config) {
  config.validate();
  SimTable table{config.seed, config.reps, {}};
  for (const auto& [n, p] : config.grid) {
    // The null calibration depends on (n, p) only, so every model shares it.
    TestConfig test = config.test;
    test.mc_seed = derive_seed(config.seed ^ kNullTag, shape_key(n, p));
    test.threads = config.threads;
    const Calibration calibration(n, p, config.stats, test);

    for (ModelId model : config.models) {
      const ModelSpec spec{.id = model, .n = n, .p = p};
      const std::uint64_t seed = cell_seed(config.seed, model, n, p);
      const std::size_t k = config.stats.size();
      std::vector<char> rejected(config.reps * k, 0);
      parallel_for(config.reps, config.threads, [&](std::size_t rep) {
        const std::uint64_t stream = derive_seed(seed, rep);
        Rng rng(stream);
        const DataMatrix data = sample_model(spec, rng);
        const auto reports = calibration.evaluate(data, TiePolicy::random(splitmix64(stream)));
        for (std::size_t s = 0; s < k; ++s) rejected[rep * k + s] = reports[s].reject ? 1 : 0;
      });
      for (std::size_t s = 0; s < k; ++s) {
        std::size_t count = 0;
        for (std::size_t rep = 0; rep < config.reps; ++rep) count += rejected[rep * k + s];
        table.cells.push_back({model, n, p, config.stats[s], config.reps,
                               static_cast<double>(count) / static_cast<double>(config.reps)});
      }
    }
  }
  return table;
}

SimTable run_size(const SimConfig& config) { return restricted(config, true); }
SimTable run_power(const SimConfig& config) { return restricted(config, false); }

void write_simtable_csv(std::ostream& out, const SimTable& table) {
  out << "model,n,p,stat,reps,rejection_rate\n";
  for (const auto& c : table.cells) {
    out << to_char(c.model) << ',' << c.n << ',' << c.p << ',' << to_string(c.stat) << ',' << c.reps << ','
        << format_double(c.rejection_rate) << '\n';
  }
}

EsdResult run_esd(CorrelationKind kind, std::size_t n, std::size_t p, std::size_t reps,
                  std::size_t bins, std::uint64_t seed, unsigned threads) {
  if (kind != CorrelationKind::phi && kind != CorrelationKind::psi)
    throw Error(ErrorCode::InvalidArgument, "spectral experiments support phi and psi only");
  if (reps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replication");
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "need at least one bin");

  std::vector<SpectralSummary> parts(reps);
  parallel_for(reps, threads, [&](std::size_t rep) {
    Rng rng(derive_seed(seed, rep));
    const auto xi = xi_matrix(null_data(n, p, rng));
    parts[rep] = sym_eigenvalues(kind == CorrelationKind::phi ? phi_matrix(xi).values : psi_matrix(xi).values);
  });

  EsdResult result;
  result.kind = kind;
  result.n = n;
  result.p = p;
  result.reps = reps;
  result.pooled = pool(parts);
  result.histogram = histogram(result.pooled, bins, default_range(result.pooled));
  const double gamma = static_cast<double>(p) / static_cast<double>(n);
  if (kind == CorrelationKind::phi) {
    const auto law = SemicircleLaw::for_phi(gamma);
    result.law = {law.u, law.r};
    result.ks = ks_distance(result.pooled, [&](double x) { return law.cdf(x); });
  } else {
    const auto law = MPLaw::for_psi(gamma);
    result.law = {law.y, law.sigma2};
    result.ks = ks_distance(result.pooled, [&](double x) { return law.cdf(x); });
  }
  return result;
}

CltResult run_clt(std::span<const unsigned> k_list, std::size_t n, std::size_t p, std::size_t reps,
                  std::uint64_t seed, unsigned threads) {
  if (reps < 200) throw Error(ErrorCode::InvalidArgument, "CLT experiments need at least 200 replications");
  if (k_list.empty()) throw Error(ErrorCode::InvalidArgument, "no trace powers requested");
  for (unsigned k : k_list)
    if (k < 1 || k > 12) throw Error(ErrorCode::RangeExceeded, "trace powers must lie in 1..12");

  const std::size_t m = k_list.size();
  std::vector<double> draws(reps * m);
  parallel_for(reps, threads, [&](std::size_t rep) {
    Rng rng(derive_seed(seed, rep));
    const Matrix psi = psi_matrix(xi_matrix(null_data(n, p, rng))).values;
    for (std::size_t s = 0; s < m; ++s) draws[rep * m + s] = trace_power(psi, k_list[s]);
  });

  CltResult result{n, p, reps, {}};
  const double gamma = static_cast<double>(p) / static_cast<double>(n);
  const double count = static_cast<double>(reps);
  for (std::size_t s = 0; s < m; ++s) {
    CltSeries series;
    series.k = k_list[s];
    series.draws.resize(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) series.draws[rep] = draws[rep * m + s];
    double sum = 0.0;
    for (double v : series.draws) sum += v;
    series.mean = sum / count;
    double m2 = 0.0;
    double m3 = 0.0;
    series.centered.resize(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const double d = series.draws[rep] - series.mean;
      series.centered[rep] = d;
      m2 += d * d;
      m3 += d * d * d;
    }
    series.variance = m2 / (count - 1.0);
    m2 /= count;
    m3 /= count;
    series.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    series.limit_variance = lss_cov(gamma, series.k, series.k);
    result.series.push_back(std::move(series));
  }
  return result;
}

void write_clt_csv(std::ostream& out, const CltResult& result) {
  out << "k,replication,value\n";
  for (const auto& s : result.series)
    for (std::size_t rep = 0; rep < s.centered.size(); ++rep)
      out << s.k << ',' << rep << ',' << format_double(s.centered[rep]) << '\n';
}

}  // namespace xicorr
