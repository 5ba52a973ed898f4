#include "xicorr/hightest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>

#include "xicorr/error.hpp"
#include "xicorr/limitlaws.hpp"
#include "xicorr/parallel.hpp"
#include "xicorr/rng.hpp"
#include "xicorr/simd.hpp"

namespace xicorr {
namespace {

bool wants(std::span<const Statistic> stats, std::initializer_list<Statistic> any) {
  return std::any_of(stats.begin(), stats.end(), [&](Statistic s) {
    return std::find(any.begin(), any.end(), s) != any.end();
  });
}

struct PairSummary {
  double sum_sq = 0.0;  // sum_{i<j} c_ij^2
  double max_sq = 0.0;  // max_{i<j} c_ij^2
};

PairSummary summarize_pairs(const Matrix& c) {
  PairSummary s;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = i + 1; j < c.cols(); ++j) {
      const double sq = c(i, j) * c(i, j);
      s.sum_sq += sq;
      s.max_sq = std::max(s.max_sq, sq);
    }
  }
  return s;
}

// tr(C^4) = ||C^2||_F^2 for symmetric C.
double trace_fourth(const Matrix& c) {
  const Matrix c2 = multiply_symmetric(c, c);
  return simd::dot(c2.data(), c2.data());
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool needs_monte_carlo(Statistic stat, CalibrationMode mode) {
  if (mode == CalibrationMode::monte_carlo) return true;
  switch (stat) {
    case Statistic::q_rho2:
    case Statistic::q_tau2:
    case Statistic::q_rho4:
    case Statistic::q_tau4:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string_view to_string(Statistic stat) noexcept {
  switch (stat) {
    case Statistic::q_r2: return "Q_r2";
    case Statistic::q_rho2: return "Q_rho2";
    case Statistic::q_rho4: return "Q_rho4";
    case Statistic::m_rho: return "M_rho";
    case Statistic::q_tau2: return "Q_tau2";
    case Statistic::q_tau4: return "Q_tau4";
    case Statistic::m_tau: return "M_tau";
    case Statistic::q_xi2: return "Q_xi2";
    case Statistic::q_xi4: return "Q_xi4";
  }
  return "unknown";
}

Statistic parse_statistic(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
  };
  const std::string key = lower(name);
  for (Statistic s : kAllStatistics)
    if (lower(to_string(s)) == key) return s;
  throw Error(ErrorCode::InvalidArgument, "unknown statistic '" + std::string(name) + "'");
}

bool is_rank_based(Statistic stat) noexcept { return stat != Statistic::q_r2; }

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["value"] = report.value;
  j["centering"] = report.centering;
  j["scale"] = report.scale;
  j["threshold"] = report.threshold;
  j["p_value"] = report.p_value ? nlohmann::json(*report.p_value) : nlohmann::json(nullptr);
  j["reject"] = report.reject;
  return j;
}

std::vector<double> raw_statistics(const DataMatrix& data, std::span<const Statistic> stats,
                                   TiePolicy ties) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);

  std::vector<Permutation> ranks;
  if (std::any_of(stats.begin(), stats.end(), is_rank_based)) ranks = column_ranks(data, ties);

  std::optional<Matrix> deviation;  // Xi - I
  std::optional<Matrix> psi;
  if (wants(stats, {Statistic::q_xi2, Statistic::q_xi4})) {
    deviation = xi_matrix_from_ranks(ranks).values;
    for (std::size_t i = 0; i < p; ++i) (*deviation)(i, i) = 0.0;
    if (wants(stats, {Statistic::q_xi4})) psi = gram(*deviation);
  }
  std::optional<Matrix> spearman;
  if (wants(stats, {Statistic::q_rho2, Statistic::m_rho, Statistic::q_rho4}))
    spearman = spearman_matrix_from_ranks(ranks).values;
  std::optional<Matrix> kendall;
  if (wants(stats, {Statistic::q_tau2, Statistic::m_tau, Statistic::q_tau4}))
    kendall = kendall_matrix_from_ranks(ranks).values;
  std::optional<Matrix> pearson;
  if (wants(stats, {Statistic::q_r2})) pearson = pearson_matrix(data).values;

  std::vector<double> raw;
  raw.reserve(stats.size());
  for (Statistic stat : stats) {
    switch (stat) {
      case Statistic::q_xi2:
        raw.push_back(simd::dot(deviation->data(), deviation->data()));
        break;
      case Statistic::q_xi4:
        raw.push_back(simd::dot(psi->data(), psi->data()));
        break;
      case Statistic::q_r2:
        raw.push_back(summarize_pairs(*pearson).sum_sq);
        break;
      case Statistic::q_rho2:
        raw.push_back(summarize_pairs(*spearman).sum_sq);
        break;
      case Statistic::q_tau2:
        raw.push_back(summarize_pairs(*kendall).sum_sq);
        break;
      case Statistic::m_rho:
        raw.push_back((nn - 1.0) * summarize_pairs(*spearman).max_sq);
        break;
      case Statistic::m_tau:
        raw.push_back(9.0 * nn * (nn - 1.0) / (2.0 * (2.0 * nn + 5.0)) * summarize_pairs(*kendall).max_sq);
        break;
      case Statistic::q_rho4:
        raw.push_back(std::pow(nn / pp, 4) * trace_fourth(*spearman));
        break;
      case Statistic::q_tau4:
        raw.push_back(trace_fourth(*kendall));
        break;
    }
  }
  return raw;
}

Standardization standardization(Statistic stat, std::size_t n, std::size_t p,
                                std::optional<double> q_xi4_centering) {
  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);
  const double pairs = pp * (pp - 1.0);
  const double gamma = pp / nn;
  switch (stat) {
    case Statistic::q_r2: {
      // Schott's n counts degrees of freedom of the mean-centered correlations.
      const double df = nn - 1.0;
      return {pairs / (2.0 * df), std::sqrt(pairs * (df - 1.0) / (df * df * (df + 2.0)))};
    }
    case Statistic::q_rho2:
      return {pairs / (2.0 * (nn - 1.0)), 1.0};
    case Statistic::q_tau2:
      return {pairs * (2.0 * nn + 5.0) / (9.0 * nn * (nn - 1.0)), 1.0};
    case Statistic::m_rho:
    case Statistic::m_tau:
      return {4.0 * std::log(pp) - std::log(std::log(pp)), 1.0};
    case Statistic::q_rho4: {
      const double n4 = std::pow(nn, 4);
      return {n4 / std::pow(nn - 1.0, 3) + n4 / std::pow(pp, 3) + 6.0 * n4 / ((nn - 1.0) * pp * pp) +
                  6.0 * n4 / (pp * (nn - 1.0) * (nn - 1.0)),
              1.0};
    }
    case Statistic::q_tau4:
      return {pp + 8.0 * pp * pp / (3.0 * nn) + 128.0 * std::pow(pp, 3) / (nn * nn) +
                  16.0 * std::pow(pp, 4) / (81.0 * std::pow(nn, 3)),
              1.0};
    case Statistic::q_xi2:
      return {to_double(exact_mean_tr_psi(n, p)), std::sqrt(lss_cov(gamma, 1, 1))};
    case Statistic::q_xi4:
      if (!q_xi4_centering)
        throw Error(ErrorCode::InvalidArgument, "Q_xi4 needs a simulated or provided centering");
      return {*q_xi4_centering, std::sqrt(lss_cov(gamma, 2, 2))};
  }
  return {};
}

std::vector<std::vector<double>> simulate_null(std::span<const Statistic> stats, std::size_t n,
                                               std::size_t p, std::size_t reps, std::uint64_t seed,
                                               NullGenerator generator, unsigned threads) {
  std::vector<std::vector<double>> raw(stats.size(), std::vector<double>(reps));
  parallel_for(reps, threads, [&](std::size_t b) {
    const std::uint64_t stream = derive_seed(seed, b);
    Rng rng(stream);
    DataMatrix data(n, p);
    // Both generators are increasing maps of the same uniforms, so ranks agree.
    for (std::size_t j = 0; j < p; ++j) {
      auto col = data.column(j);
      for (auto& v : col) {
        const double u = rng.uniform();
        v = generator == NullGenerator::gaussian ? normal_quantile(u)
                                                 : std::tan(std::numbers::pi * (u - 0.5));
      }
    }
    const auto values = raw_statistics(data, stats, TiePolicy::random(splitmix64(stream)));
    for (std::size_t s = 0; s < stats.size(); ++s) raw[s][b] = values[s];
  });
  return raw;
}

double empirical_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::ceil(level * static_cast<double>(values.size()) - 1e-9);
  const auto rank = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(values.size())));
  return values[rank - 1];
}

double calibrate_null(Statistic stat, std::size_t n, std::size_t p, std::size_t reps,
                      std::uint64_t seed, double alpha, NullGenerator generator, unsigned threads,
                      bool allow_model_dependent) {
  if (reps < 100) throw Error(ErrorCode::CalibrationTooSmall, "need at least 100 null replications");
  if (!is_rank_based(stat) && !allow_model_dependent)
    throw Error(ErrorCode::NotDistributionFree,
                std::string(to_string(stat)) + " has a model-dependent null law");
  const Statistic stats[] = {stat};
  auto raw = std::move(simulate_null(stats, n, p, reps, seed, generator, threads).front());
  std::optional<double> centering;
  if (stat == Statistic::q_xi4) centering = mean(raw);
  const auto st = standardization(stat, n, p, centering);
  for (auto& v : raw) v = (v - st.centering) / st.scale;
  return empirical_quantile(std::move(raw), 1.0 - alpha);
}

double extreme_value_cdf(double y) {
  return std::exp(-std::exp(-0.5 * y) / std::sqrt(8.0 * std::numbers::pi));
}

double extreme_value_threshold(double alpha) {
  return -2.0 * std::log(-std::sqrt(8.0 * std::numbers::pi) * std::log1p(-alpha));
}

Calibration::Calibration(std::size_t n, std::size_t p, std::vector<Statistic> stats,
                         const TestConfig& config)
    : n_(n), p_(p), stats_(std::move(stats)) {
  config.validate();
  if (n < 3 || p < 2) throw Error(ErrorCode::InvalidSample, "tests need n >= 3 and p >= 2");

  // One null pass covers every statistic that needs simulation.
  std::vector<Statistic> simulated;
  for (Statistic s : stats_) {
    const bool overridden = config.threshold_overrides.contains(s);
    const bool centering = s == Statistic::q_xi4 && !config.q_xi4_centering;
    if ((needs_monte_carlo(s, config.calibration) && !overridden) || centering)
      if (std::find(simulated.begin(), simulated.end(), s) == simulated.end()) simulated.push_back(s);
  }
  std::vector<std::vector<double>> null_raw;
  if (!simulated.empty()) {
    if (config.mc_reps < 100)
      throw Error(ErrorCode::CalibrationTooSmall, "need at least 100 null replications");
    null_raw = simulate_null(simulated, n, p, config.mc_reps, config.mc_seed, config.null_generator,
                             config.threads);
  }
  auto null_stream = [&](Statistic s) -> std::vector<double>* {
    const auto it = std::find(simulated.begin(), simulated.end(), s);
    return it == simulated.end() ? nullptr : &null_raw[static_cast<std::size_t>(it - simulated.begin())];
  };

  const double z = normal_quantile(1.0 - config.alpha);
  for (Statistic s : stats_) {
    Entry e{s, {}, 0.0, NullLaw::none, {}, std::nullopt};
    std::vector<double>* stream = null_stream(s);
    std::optional<double> centering = config.q_xi4_centering;
    if (s == Statistic::q_xi4 && !centering) centering = mean(*stream);
    e.standardization = standardization(s, n, p, centering);

    if (const auto it = config.threshold_overrides.find(s); it != config.threshold_overrides.end()) {
      e.threshold = it->second;
      e.law = (s == Statistic::m_rho || s == Statistic::m_tau) ? NullLaw::extreme_value
              : (s == Statistic::q_xi2 || s == Statistic::q_xi4 || s == Statistic::q_r2) ? NullLaw::normal
                                                                                       : NullLaw::none;
    } else if (needs_monte_carlo(s, config.calibration)) {
      e.null_values = *stream;
      for (auto& v : e.null_values) v = (v - e.standardization.centering) / e.standardization.scale;
      std::sort(e.null_values.begin(), e.null_values.end());
      e.threshold = empirical_quantile(e.null_values, 1.0 - config.alpha);
      e.law = NullLaw::empirical;
      if (!is_rank_based(s))
        e.warning = std::string(to_string(s)) +
                    " is not distribution-free; its Monte-Carlo threshold assumes the configured null generator";
    } else if (s == Statistic::m_rho || s == Statistic::m_tau) {
      e.threshold = extreme_value_threshold(config.alpha);
      e.law = NullLaw::extreme_value;
    } else {
      e.threshold = z;
      e.law = NullLaw::normal;
    }
    entries_.push_back(std::move(e));
  }
}

TestReport Calibration::report(const Entry& entry, double raw) const {
  TestReport r;
  r.name = std::string(to_string(entry.stat));
  r.centering = entry.standardization.centering;
  r.scale = entry.standardization.scale;
  r.value = (raw - r.centering) / r.scale;
  r.threshold = entry.threshold;
  r.reject = r.value > r.threshold;
  r.warning = entry.warning;
  switch (entry.law) {
    case NullLaw::normal:
      r.p_value = 0.5 * std::erfc(r.value / std::numbers::sqrt2);
      break;
    case NullLaw::extreme_value:
      r.p_value = -std::expm1(-std::exp(-0.5 * r.value) / std::sqrt(8.0 * std::numbers::pi));
      break;
    case NullLaw::empirical: {
      const auto& null = entry.null_values;
      const auto at_least = static_cast<double>(null.end() - std::lower_bound(null.begin(), null.end(), r.value));
      r.p_value = (1.0 + at_least) / (1.0 + static_cast<double>(null.size()));
      break;
    }
    case NullLaw::none:
      break;
  }
  return r;
}

std::vector<TestReport> Calibration::evaluate_raw(std::span<const double> raw) const {
  if (raw.size() != entries_.size()) throw Error(ErrorCode::SizeMismatch, "raw statistic count mismatch");
  std::vector<TestReport> reports;
  reports.reserve(entries_.size());
  for (std::size_t s = 0; s < entries_.size(); ++s) reports.push_back(report(entries_[s], raw[s]));
  return reports;
}

std::vector<TestReport> Calibration::evaluate(const DataMatrix& data, TiePolicy ties) const {
  if (data.n() != n_ || data.p() != p_)
    throw Error(ErrorCode::SizeMismatch, "data shape differs from the calibrated (n, p)");
  return evaluate_raw(raw_statistics(data, stats_, ties));
}

std::vector<TestReport> run_tests(const DataMatrix& data, std::span<const Statistic> stats,
                                  const TestConfig& config, TiePolicy ties) {
  Calibration calibration(data.n(), data.p(), {stats.begin(), stats.end()}, config);
  return calibration.evaluate(data, ties);
}

namespace {

TestReport run_single(Statistic stat, const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  const Statistic stats[] = {stat};
  return run_tests(data, stats, config, ties).front();
}

}  // namespace

TestReport q_xi2(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::q_xi2, data, config, ties);
}
TestReport q_xi4(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::q_xi4, data, config, ties);
}
TestReport schott_q_r2(const DataMatrix& data, const TestConfig& config) {
  return run_single(Statistic::q_r2, data, config, TiePolicy::error());
}
TestReport leung_q_rho2(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::q_rho2, data, config, ties);
}
TestReport leung_q_tau2(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::q_tau2, data, config, ties);
}
TestReport han_m_rho(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::m_rho, data, config, ties);
}
TestReport han_m_tau(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::m_tau, data, config, ties);
}
TestReport bao_q_rho4(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::q_rho4, data, config, ties);
}
TestReport li_q_tau4(const DataMatrix& data, const TestConfig& config, TiePolicy ties) {
  return run_single(Statistic::q_tau4, data, config, ties);
}

}  // namespace xicorr
