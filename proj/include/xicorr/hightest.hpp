#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xicorr/permutation.hpp"
#include "xicorr/rankcorr.hpp"

namespace xicorr {

/// The nine complete-independence statistics, in table column order.
enum class Statistic { q_r2, q_rho2, q_rho4, m_rho, q_tau2, q_tau4, m_tau, q_xi2, q_xi4 };

inline constexpr std::array<Statistic, 9> kAllStatistics = {
    Statistic::q_r2,   Statistic::q_rho2, Statistic::q_rho4, Statistic::m_rho, Statistic::q_tau2,
    Statistic::q_tau4, Statistic::m_tau,  Statistic::q_xi2,  Statistic::q_xi4};

std::string_view to_string(Statistic stat) noexcept;
/// Accepts the names produced by to_string; throws InvalidArgument otherwise.
Statistic parse_statistic(std::string_view name);
/// Everything except Schott's Pearson-based Q_r2 depends on the data only through ranks.
bool is_rank_based(Statistic stat) noexcept;

enum class CalibrationMode { asymptotic, monte_carlo };
enum class NullGenerator { gaussian, cauchy };

struct TestConfig {
  double alpha = 0.05;
  CalibrationMode calibration = CalibrationMode::asymptotic;
  /// Null replications for Monte-Carlo thresholds and the simulated Q_xi4 centering.
  std::size_t mc_reps = 1000;
  std::uint64_t mc_seed = 0;
  NullGenerator null_generator = NullGenerator::gaussian;
  unsigned threads = 0;
  /// Replaces the simulated E tr(Psi^2) used to center Q_xi4.
  std::optional<double> q_xi4_centering;
  /// Plug-in critical values; take precedence over both calibration modes.
  std::map<Statistic, double> threshold_overrides;

  void validate() const;
};

/// value = (raw - centering) / scale; reject iff value > threshold.
struct TestReport {
  std::string name;
  double value = 0.0;
  double centering = 0.0;
  double scale = 1.0;
  double threshold = 0.0;
  std::optional<double> p_value;
  bool reject = false;
  /// Set when the threshold came from a null model the statistic is not free of.
  std::optional<std::string> warning;
};

/// {name, value, centering, scale, threshold, p_value, reject}; p_value null when absent.
nlohmann::json to_json(const TestReport& report);

/// Unstandardized part of each statistic, e.g. tr(Psi) for Q_xi2 or sum_{i<j} r_ij^2
/// for Schott. Shared matrices are built once for all requested statistics.
std::vector<double> raw_statistics(const DataMatrix& data, std::span<const Statistic> stats,
                                   TiePolicy ties = TiePolicy::error());

struct Standardization {
  double centering = 0.0;
  double scale = 1.0;
};

/// Closed-form centering/scale at (n, p). Q_xi4 has no closed-form centering:
/// pass it in `q_xi4_centering` (throws InvalidArgument when missing).
Standardization standardization(Statistic stat, std::size_t n, std::size_t p,
                                std::optional<double> q_xi4_centering = std::nullopt);

/// Raw statistic values under complete independence, raw[s][b] for stats[s] and
/// replication b. Null columns are monotone transforms of shared uniforms, so
/// rank-based streams do not depend on `generator`. Deterministic in `seed`.
std::vector<std::vector<double>> simulate_null(std::span<const Statistic> stats, std::size_t n,
                                               std::size_t p, std::size_t reps, std::uint64_t seed,
                                               NullGenerator generator = NullGenerator::gaussian,
                                               unsigned threads = 0);

/// Type-1 empirical quantile: the ceil(level * size)-th smallest value.
double empirical_quantile(std::vector<double> values, double level);

/// Monte-Carlo (1 - alpha) critical value of the standardized statistic. Throws
/// CalibrationTooSmall for reps < 100 and NotDistributionFree for Q_r2 unless
/// `allow_model_dependent` is set.
double calibrate_null(Statistic stat, std::size_t n, std::size_t p, std::size_t reps,
                      std::uint64_t seed, double alpha = 0.05,
                      NullGenerator generator = NullGenerator::gaussian, unsigned threads = 0,
                      bool allow_model_dependent = false);

/// Critical values, centerings and null laws for one (n, p), reusable across data sets.
class Calibration {
 public:
  Calibration(std::size_t n, std::size_t p, std::vector<Statistic> stats, const TestConfig& config);

  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return p_; }
  std::span<const Statistic> statistics() const noexcept { return stats_; }

  /// Reports for every calibrated statistic. Throws SizeMismatch on a shape change.
  std::vector<TestReport> evaluate(const DataMatrix& data, TiePolicy ties = TiePolicy::error()) const;
  /// Report from precomputed raw values, in the order of statistics().
  std::vector<TestReport> evaluate_raw(std::span<const double> raw) const;

 private:
  enum class NullLaw { normal, extreme_value, empirical, none };
  struct Entry {
    Statistic stat;
    Standardization standardization;
    double threshold;
    NullLaw law;
    std::vector<double> null_values;  // sorted, standardized; empirical law only
    std::optional<std::string> warning;
  };

  TestReport report(const Entry& entry, double raw) const;

  std::size_t n_;
  std::size_t p_;
  std::vector<Statistic> stats_;
  std::vector<Entry> entries_;
};

std::vector<TestReport> run_tests(const DataMatrix& data, std::span<const Statistic> stats,
                                  const TestConfig& config, TiePolicy ties = TiePolicy::error());

TestReport q_xi2(const DataMatrix& data, const TestConfig& config = {},
                 TiePolicy ties = TiePolicy::error());
TestReport q_xi4(const DataMatrix& data, const TestConfig& config = {},
                 TiePolicy ties = TiePolicy::error());
TestReport schott_q_r2(const DataMatrix& data, const TestConfig& config = {});
TestReport leung_q_rho2(const DataMatrix& data, const TestConfig& config = {},
                        TiePolicy ties = TiePolicy::error());
TestReport leung_q_tau2(const DataMatrix& data, const TestConfig& config = {},
                        TiePolicy ties = TiePolicy::error());
TestReport han_m_rho(const DataMatrix& data, const TestConfig& config = {},
                     TiePolicy ties = TiePolicy::error());
TestReport han_m_tau(const DataMatrix& data, const TestConfig& config = {},
                     TiePolicy ties = TiePolicy::error());
TestReport bao_q_rho4(const DataMatrix& data, const TestConfig& config = {},
                      TiePolicy ties = TiePolicy::error());
TestReport li_q_tau4(const DataMatrix& data, const TestConfig& config = {},
                     TiePolicy ties = TiePolicy::error());

/// Upper alpha critical value of the max-type limit P(M <= y) = exp(-(8 pi)^{-1/2} e^{-y/2}).
double extreme_value_threshold(double alpha);
double extreme_value_cdf(double y);

}  // namespace xicorr
