#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "xicorr/error.hpp"
#include "xicorr/limitlaws.hpp"
#include "xicorr/montecarlo.hpp"

using namespace xicorr;

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("model identifiers") {
  for (char c : {'a', 'b', 'c', 'd', 'e', 'f'}) CHECK(to_char(parse_model(c)) == c);
  CHECK_THROWS_AS(parse_model('g'), Error);
  CHECK(is_null_model(ModelId::b));
  CHECK_FALSE(is_null_model(ModelId::c));
}

TEST_CASE("samplers") {
  Rng rng(100);
  const int draws = 100000;
  double s = 0, ss = 0;
  for (int i = 0; i < draws; ++i) {
    const double z = standard_normal(rng);
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / draws) < 0.02);
  CHECK(std::abs(ss / draws - 1.0) < 0.02);
  int below = 0;
  for (int i = 0; i < draws; ++i) below += standard_cauchy(rng) < 1.0;
  CHECK(std::abs(below / double(draws) - 0.75) < 0.01);
}

TEST_CASE("psd factorization") {
  const Matrix id = psd_factor(Matrix::identity(4));
  CHECK(id == Matrix::identity(4));
  Matrix s(2, 2);
  s(0, 0) = s(1, 1) = 1.0;
  s(0, 1) = s(1, 0) = 0.25;
  const Matrix l = psd_factor(s);
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(1, 0) == doctest::Approx(0.25));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(1 - 0.0625)));
  CHECK(l(0, 1) == 0.0);

  Matrix bad(2, 2);
  bad(0, 0) = bad(1, 1) = 1.0;
  bad(0, 1) = bad(1, 0) = 2.0;
  try {
    psd_factor(bad);
    FAIL("expected NotPSD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
  Matrix singular(2, 2, 1.0);
  CHECK_NOTHROW(psd_factor(singular));
}

TEST_CASE("banded covariance") {
  const Matrix sigma = banded_covariance(12, 0.25, 4);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(sigma(i, i) == 1.0);
    for (std::size_t j = 0; j < 12; ++j) CHECK(sigma(i, j) == sigma(j, i));
  }
  CHECK(sigma(0, 4) == doctest::Approx(std::pow(0.25, 4)));
  CHECK(sigma(0, 5) == 0.0);
  const Matrix l = psd_factor(banded_covariance(100, 0.25, 4));
  const Matrix back = gram(l);
  const Matrix full = banded_covariance(100, 0.25, 4);
  double diff = 0, norm = 0;
  for (std::size_t k = 0; k < full.data().size(); ++k) {
    diff += std::pow(back.data()[k] - full.data()[k], 2);
    norm += std::pow(full.data()[k], 2);
  }
  CHECK(std::sqrt(diff / norm) < 1e-9);
}

TEST_CASE("model sample properties") {
  Rng rng(7);
  const std::size_t n = 100000;
  const auto a = sample_model({.id = ModelId::a, .n = n, .p = 2}, rng);
  double mean = 0, var = 0;
  for (double v : a.column(0)) mean += v;
  mean /= n;
  for (double v : a.column(0)) var += (v - mean) * (v - mean);
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var / n - 1.0) < 0.02);

  const auto c = sample_model({.id = ModelId::c, .n = n, .p = 6}, rng);
  CHECK(std::abs(pearson(c.column(0), c.column(1)) - 0.25) < 0.02);
  CHECK(std::abs(pearson(c.column(2), c.column(4)) - 0.0625) < 0.02);

  const auto f = sample_model({.id = ModelId::f, .n = n, .p = 4}, rng);
  CHECK(std::abs(pearson(f.column(0), f.column(2))) < 0.02);
  CHECK(chatterjee_xi(f.column(0), f.column(2)) > 0.3);

  const auto e = sample_model({.id = ModelId::e, .n = 2000, .p = 4}, rng);
  CHECK(chatterjee_xi(e.column(1), e.column(3)) > 0.3);
  CHECK(std::abs(chatterjee_xi(e.column(0), e.column(1))) < 0.1);

  // (d): neighbours share latent cubes, distant columns do not.
  const auto d = sample_model({.id = ModelId::d, .n = n, .p = 5}, rng);
  CHECK(pearson(d.column(3), d.column(4)) > 0.02);
  CHECK(std::abs(pearson(d.column(0), d.column(4))) < 0.02);

  CHECK_THROWS_AS(sample_model({.id = ModelId::e, .n = 10, .p = 5}, rng), Error);
  CHECK_THROWS_AS(sample_model({.id = ModelId::a, .n = 2, .p = 5}, rng), Error);
}

TEST_CASE("simulation tables are deterministic and thread-independent") {
  SimConfig config;
  config.models = {ModelId::a, ModelId::e};
  config.stats = {Statistic::q_xi2, Statistic::q_rho2, Statistic::q_r2};
  config.grid = {{20, 6}};
  config.reps = 120;
  config.seed = 7;
  config.test.mc_reps = 100;
  config.threads = 1;
  const SimTable one = run_table(config);
  config.threads = 4;
  const SimTable four = run_table(config);
  REQUIRE(one.cells.size() == 6);
  for (std::size_t k = 0; k < one.cells.size(); ++k) {
    CHECK(one.cells[k].rejection_rate == four.cells[k].rejection_rate);
    CHECK(one.cells[k].rejection_rate >= 0.0);
    CHECK(one.cells[k].rejection_rate <= 1.0);
  }
  CHECK(one.rate(ModelId::e, 20, 6, Statistic::q_xi2) == one.cells[3].rejection_rate);
  CHECK_THROWS_AS(one.rate(ModelId::b, 20, 6, Statistic::q_xi2), Error);

  std::ostringstream a, b;
  write_simtable_csv(a, one);
  write_simtable_csv(b, four);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("model,n,p,stat,reps,rejection_rate\na,20,6,Q_xi2,120,", 0) == 0);
}

TEST_CASE("simulation config validation") {
  SimConfig config;
  config.models = {ModelId::a};
  config.grid = {{20, 6}};
  config.reps = 50;
  CHECK_THROWS_AS(run_table(config), Error);
  config.reps = 100;
  config.models = {ModelId::f};
  config.grid = {{20, 5}};
  CHECK_THROWS_AS(run_table(config), Error);
  config.models = {ModelId::c};
  config.grid = {{20, 6}};
  CHECK_THROWS_AS(run_size(config), Error);
  config.models = {ModelId::a};
  CHECK_THROWS_AS(run_power(config), Error);
}

TEST_CASE("rank-based sizes agree between the two null models") {
  SimConfig config;
  config.models = {ModelId::a, ModelId::b};
  config.stats = {Statistic::q_rho2, Statistic::q_tau2, Statistic::m_rho, Statistic::q_xi2, Statistic::q_xi4};
  config.grid = {{30, 10}};
  config.reps = 500;
  config.seed = 21;
  config.test.mc_reps = 300;
  const SimTable t = run_size(config);
  for (Statistic s : config.stats) {
    const double pa = t.rate(ModelId::a, 30, 10, s);
    const double pb = t.rate(ModelId::b, 30, 10, s);
    // Two independent binomial proportions near 0.05: 4 standard errors.
    CHECK(std::abs(pa - pb) < 4 * std::sqrt(2 * 0.05 * 0.95 / 500));
  }
}

TEST_CASE("spectral experiments") {
  const auto tiny = run_esd(CorrelationKind::phi, 20, 10, 1, 12, 3);
  double mass = 0;
  for (std::size_t b = 0; b < 12; ++b)
    mass += tiny.histogram.densities[b] * (tiny.histogram.bin_edges[b + 1] - tiny.histogram.bin_edges[b]);
  CHECK(mass == doctest::Approx(1.0));
  CHECK(tiny.pooled.dimension() == 10);

  const auto phi = run_esd(CorrelationKind::phi, 200, 100, 5, 50, 1);
  CHECK(phi.ks <= 0.08);
  CHECK(phi.law.first == 1.0);
  CHECK(phi.law.second == doctest::Approx(2 * std::sqrt(0.1)));
  const auto psi = run_esd(CorrelationKind::psi, 200, 100, 5, 50, 1);
  CHECK(psi.ks <= 0.08);
  CHECK(psi.law.second == doctest::Approx(0.2));
  CHECK(psi.pooled.dimension() == 500);
  CHECK_THROWS_AS(run_esd(CorrelationKind::xi, 20, 10, 1, 10, 1), Error);
}

TEST_CASE("trace-power draws") {
  const std::vector<unsigned> ks{1, 2};
  const auto r = run_clt(ks, 30, 15, 200, 4, 2);
  REQUIRE(r.series.size() == 2);
  for (const auto& s : r.series) {
    CHECK(s.draws.size() == 200);
    double sum = 0;
    for (double v : s.centered) sum += v;
    CHECK(std::abs(sum) < 1e-9 * 200 * std::abs(s.mean));
  }
  CHECK(r.series[0].limit_variance == doctest::Approx(lss_cov(0.5, 1, 1)));
  CHECK(r.series[0].mean == doctest::Approx(to_double(exact_mean_tr_psi(30, 15))).epsilon(0.05));
  std::ostringstream out;
  write_clt_csv(out, r);
  CHECK(out.str().rfind("k,replication,value\n1,0,", 0) == 0);
  CHECK_THROWS_AS(run_clt(ks, 30, 15, 199, 4), Error);
  const std::vector<unsigned> bad{0};
  CHECK_THROWS_AS(run_clt(bad, 30, 15, 200, 4), Error);
}
