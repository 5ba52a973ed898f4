#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "xicorr/error.hpp"
#include "xicorr/hightest.hpp"
#include "xicorr/limitlaws.hpp"
#include "xicorr/spectra.hpp"

using namespace xicorr;
using xicorr::testing::gaussian_data;

TEST_CASE("statistic names round-trip") {
  for (Statistic s : kAllStatistics) CHECK(parse_statistic(to_string(s)) == s);
  CHECK(parse_statistic("q_xi2") == Statistic::q_xi2);
  CHECK_THROWS_AS(parse_statistic("Q_xi3"), Error);
  CHECK_FALSE(is_rank_based(Statistic::q_r2));
  CHECK(is_rank_based(Statistic::m_tau));
}

TEST_CASE("closed-form standardizations") {
  const auto xi2 = standardization(Statistic::q_xi2, 100, 100);
  CHECK(xi2.centering == to_double(exact_mean_tr_psi(100, 100)));
  CHECK(xi2.scale * xi2.scale == doctest::Approx(0.32));
  CHECK(standardization(Statistic::q_xi4, 100, 100, 30.0).scale == doctest::Approx(std::sqrt(0.9216)));
  CHECK_THROWS_AS(standardization(Statistic::q_xi4, 100, 100), Error);
  const auto mt = standardization(Statistic::m_tau, 50, 2);
  CHECK(mt.centering == doctest::Approx(4 * std::log(2.0) - std::log(std::log(2.0))));
  CHECK(standardization(Statistic::q_rho2, 11, 4).centering == doctest::Approx(12.0 / 20.0));
}

TEST_CASE("raw statistics") {
  const auto d = gaussian_data(30, 5, 4);
  const std::vector<Statistic> stats{Statistic::q_xi2, Statistic::q_xi4, Statistic::q_rho2, Statistic::m_tau};
  const auto raw = raw_statistics(d, stats);
  const auto xi = xi_matrix(d);
  const auto psi = psi_matrix(xi);
  CHECK(raw[0] == doctest::Approx(trace(psi.values)).epsilon(1e-12));
  CHECK(raw[1] == doctest::Approx(trace_power(psi.values, 2, TracePowerMethod::spectral)).epsilon(1e-10));
  const auto sp = spearman_matrix(d);
  double sum = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) sum += sp(i, j) * sp(i, j);
  CHECK(raw[2] == doctest::Approx(sum));
  const auto single = raw_statistics(d, std::vector<Statistic>{Statistic::m_tau});
  CHECK(single[0] == raw[3]);
}

TEST_CASE("functional dependence is rejected by Q_xi2") {
  const std::size_t n = 60;
  std::vector<double> x(n);
  Rng rng(2);
  for (auto& v : x) v = rng.normal();
  const auto d = DataMatrix::from_columns({x, x});
  const auto r = q_xi2(d);
  const double nn = static_cast<double>(n);
  CHECK(r.value * r.scale + r.centering == doctest::Approx(2 * std::pow((nn - 2) / (nn + 1), 2)));
  CHECK(r.reject);
  CHECK(r.p_value.value() < 1e-6);
}

TEST_CASE("decision rule and p-values") {
  const auto d = gaussian_data(80, 20, 9);
  TestConfig config;
  config.mc_reps = 200;
  config.mc_seed = 3;
  const auto reports = run_tests(d, kAllStatistics, config);
  REQUIRE(reports.size() == 9);
  for (const auto& r : reports) {
    CHECK(r.reject == (r.value > r.threshold));
    REQUIRE(r.p_value.has_value());
    CHECK(*r.p_value > 0.0);
    CHECK(*r.p_value <= 1.0);
  }
  CHECK(reports[0].threshold == doctest::Approx(normal_quantile(0.95)));
  CHECK(reports[3].threshold == doctest::Approx(extreme_value_threshold(0.05)));

  const auto j = to_json(reports[7]);
  const std::set<std::string> keys{"name", "value", "centering", "scale", "threshold", "p_value", "reject"};
  std::set<std::string> got;
  for (const auto& [k, v] : j.items()) got.insert(k);
  CHECK(got == keys);
  CHECK(j["name"] == "Q_xi2");
}

TEST_CASE("normal p-values decrease with the statistic") {
  const Calibration cal(50, 10, {Statistic::q_xi2}, TestConfig{});
  double prev = 1.0;
  for (double raw = 0.0; raw < 10.0; raw += 0.5) {
    const auto r = cal.evaluate_raw(std::vector<double>{raw}).front();
    CHECK(*r.p_value <= prev);
    CHECK(*r.p_value == doctest::Approx(1.0 - normal_cdf(r.value)).epsilon(1e-9));
    prev = *r.p_value;
  }
}

TEST_CASE("extreme-value threshold") {
  for (double alpha : {0.01, 0.05, 0.1, 0.5})
    CHECK(extreme_value_cdf(extreme_value_threshold(alpha)) == doctest::Approx(1 - alpha).epsilon(1e-12));
}

TEST_CASE("empirical quantile is type 1") {
  const std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(empirical_quantile(v, 0.2) == 1);
  CHECK(empirical_quantile(v, 0.21) == 2);
  CHECK(empirical_quantile(v, 0.95) == 5);
  CHECK(empirical_quantile(v, 0.5) == 3);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), Error);
}

TEST_CASE("Monte-Carlo calibration guards") {
  try {
    calibrate_null(Statistic::q_rho2, 20, 5, 99, 1);
    FAIL("expected CalibrationTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CalibrationTooSmall);
  }
  try {
    calibrate_null(Statistic::q_r2, 20, 5, 200, 1);
    FAIL("expected NotDistributionFree");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotDistributionFree);
  }
  CHECK_NOTHROW(calibrate_null(Statistic::q_r2, 20, 5, 200, 1, 0.05, NullGenerator::gaussian, 0, true));

  TestConfig small;
  small.mc_reps = 50;
  CHECK_THROWS_AS(Calibration(20, 5, {Statistic::q_xi4}, small), Error);
  small.q_xi4_centering = 1.0;
  CHECK_NOTHROW(Calibration(20, 5, {Statistic::q_xi4}, small));

  TestConfig mc;
  mc.calibration = CalibrationMode::monte_carlo;
  mc.mc_reps = 100;
  const auto r = run_tests(gaussian_data(20, 5, 1), std::vector<Statistic>{Statistic::q_r2}, mc).front();
  CHECK(r.warning.has_value());
  TestConfig bad;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("calibration is deterministic and generator-free for rank statistics") {
  const std::vector<Statistic> stats{Statistic::q_rho2, Statistic::q_tau4, Statistic::m_rho, Statistic::q_xi2,
                                     Statistic::q_xi4};
  const auto g = simulate_null(stats, 20, 6, 150, 77, NullGenerator::gaussian, 1);
  const auto c = simulate_null(stats, 20, 6, 150, 77, NullGenerator::cauchy, 3);
  CHECK(g == c);
  CHECK(g == simulate_null(stats, 20, 6, 150, 77, NullGenerator::gaussian, 4));
  CHECK(g != simulate_null(stats, 20, 6, 150, 78, NullGenerator::gaussian, 1));

  TestConfig config;
  config.mc_reps = 150;
  config.mc_seed = 5;
  const auto d = gaussian_data(20, 6, 3);
  CHECK(q_xi4(d, config).centering == q_xi4(d, config).centering);
}

TEST_CASE("alpha = 1/2 puts the threshold at the null median") {
  const auto g = simulate_null(std::vector<Statistic>{Statistic::q_tau2}, 25, 8, 401, 9, NullGenerator::gaussian, 0);
  auto raw = g.front();
  const double centering = standardization(Statistic::q_tau2, 25, 8).centering;
  for (auto& v : raw) v -= centering;
  std::sort(raw.begin(), raw.end());
  CHECK(calibrate_null(Statistic::q_tau2, 25, 8, 401, 9, 0.5) == raw[200]);
}

TEST_CASE("threshold overrides") {
  TestConfig config;
  config.threshold_overrides[Statistic::q_rho2] = 0.123;
  config.threshold_overrides[Statistic::m_rho] = 7.0;
  const auto reports =
      run_tests(gaussian_data(30, 4, 2), std::vector<Statistic>{Statistic::q_rho2, Statistic::m_rho}, config);
  CHECK(reports[0].threshold == 0.123);
  CHECK_FALSE(reports[0].p_value.has_value());
  CHECK(reports[1].threshold == 7.0);
  CHECK(reports[1].p_value.has_value());
}

TEST_CASE("reports are invariant under monotone transforms") {
  const auto d = gaussian_data(40, 8, 31);
  DataMatrix t(40, 8);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < 40; ++i) t(i, j) = std::exp(d(i, j));
  TestConfig config;
  config.mc_reps = 100;
  std::vector<Statistic> ranked;
  for (Statistic s : kAllStatistics)
    if (is_rank_based(s)) ranked.push_back(s);
  const Calibration cal(40, 8, ranked, config);
  const auto a = cal.evaluate(d);
  const auto b = cal.evaluate(t);
  for (std::size_t s = 0; s < a.size(); ++s) CHECK(std::abs(a[s].value - b[s].value) <= 1e-12 * std::max(1.0, std::abs(a[s].value)));
  CHECK_THROWS_AS(cal.evaluate(gaussian_data(41, 8, 1)), Error);
}

TEST_CASE("ties in test data") {
  auto d = gaussian_data(30, 3, 8);
  d(1, 0) = d(0, 0);
  CHECK_THROWS_AS(q_xi2(d), Error);
  CHECK_NOTHROW(q_xi2(d, {}, TiePolicy::random(1)));
}
