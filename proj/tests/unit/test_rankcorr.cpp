#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"
#include "xicorr/error.hpp"
#include "xicorr/rankcorr.hpp"

using namespace xicorr;
using xicorr::testing::gaussian_data;

namespace {

double xi_by_definition(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ry(n);
  for (std::size_t i = 0; i < n; ++i)
    ry[i] = static_cast<double>(std::count_if(y.begin(), y.end(), [&](double v) { return v <= y[i]; }));
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) s += std::abs(ry[order[k + 1]] - ry[order[k]]);
  const double nn = static_cast<double>(n);
  return 1.0 - 3.0 * s / (nn * nn - 1.0);
}

}  // namespace

TEST_CASE("data matrix construction") {
  const auto d = DataMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d(1, 0) == 3);
  CHECK(d(2, 1) == 6);
  const auto c = DataMatrix::from_columns({{1, 3, 5}, {2, 4, 6}});
  CHECK(c(1, 0) == 3);
  CHECK_THROWS_AS(DataMatrix::from_rows({{1, 2}, {3}, {5, 6}}), Error);
  CHECK_THROWS_AS(DataMatrix::from_rows({{1, 2}, {3, 4}}), Error);
  CHECK_THROWS_AS(DataMatrix::from_rows({{1}, {3}, {4}}), Error);
  CHECK_THROWS_AS(DataMatrix::from_rows({{1, 2}, {3, NAN}, {5, 6}}), Error);
}

TEST_CASE("f_xi of fixed permutations") {
  for (std::size_t n : {3, 5, 10}) {
    const double nn = static_cast<double>(n);
    CHECK(f_xi(Permutation::identity(n)) == doctest::Approx((nn - 2) / (nn + 1)));
    CHECK(f_xi(Permutation::reversal(n)) == doctest::Approx((nn - 2) / (nn + 1)));
    CHECK(f_rho(Permutation::identity(n)) == doctest::Approx(1.0));
    CHECK(f_rho(Permutation::reversal(n)) == doctest::Approx(-1.0));
    CHECK(f_tau(Permutation::identity(n)) == doctest::Approx(1.0));
    CHECK(f_tau(Permutation::reversal(n)) == doctest::Approx(-1.0));
  }
  CHECK(f_xi(Permutation({1, 3, 2})) == doctest::Approx(-0.125));
}

TEST_CASE("chatterjee xi matches its definition") {
  const auto d = gaussian_data(57, 4, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j)
        CHECK(chatterjee_xi(d.column(i), d.column(j)) ==
              doctest::Approx(xi_by_definition(d.column(i), d.column(j))).epsilon(1e-14));
  const auto xi = xi_matrix(d);
  CHECK(xi(0, 1) == chatterjee_xi(d.column(0), d.column(1)));
  CHECK(xi(2, 2) == 1.0);
}

TEST_CASE("xi is not symmetric") {
  // y = x^2 on a symmetric grid: y is a function of x but not conversely.
  std::vector<double> x, y;
  for (int k = -20; k <= 20; ++k) {
    const double v = k + 0.01 * (k > 0);
    x.push_back(v);
    y.push_back(v * v + 1e-6 * k);
  }
  const double xy = chatterjee_xi(x, y);
  const double yx = chatterjee_xi(y, x);
  CHECK(xy > 0.8);
  CHECK(yx < 0.5);
}

TEST_CASE("phi and psi") {
  const auto xi = xi_matrix(gaussian_data(40, 6, 8));
  const auto phi = phi_matrix(xi);
  const auto psi = psi_matrix(xi);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(phi(i, i) == 1.0);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(phi(i, j) == phi(j, i));
      CHECK(psi(i, j) == doctest::Approx(psi(j, i)).epsilon(1e-14));
      if (i != j) CHECK(phi(i, j) == doctest::Approx(0.5 * (xi(i, j) + xi(j, i))));
    }
  }
  double off = 0.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      if (i != j) off += xi(i, j) * xi(i, j);
  CHECK(xicorr::testing::rel_diff(trace(psi.values), off) < 1e-10);
}

TEST_CASE("spearman equals pearson on ranks") {
  const auto d = gaussian_data(33, 5, 12);
  const auto ranks = column_ranks(d);
  std::vector<std::vector<double>> cols;
  for (const auto& r : ranks) cols.emplace_back(r.image().begin(), r.image().end());
  const auto pr = pearson_matrix(DataMatrix::from_columns(cols));
  const auto sp = spearman_matrix(d);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(sp(i, j) == doctest::Approx(pr(i, j)).epsilon(1e-12));
}

TEST_CASE("pearson rejects constant columns") {
  const auto d = DataMatrix::from_rows({{1, 2}, {1, 3}, {1, 5}});
  try {
    pearson_matrix(d);
    FAIL("expected DegenerateColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateColumn);
  }
}

TEST_CASE("inversion counting") {
  std::vector<std::int32_t> v{3, 1, 2, 5, 4};
  std::vector<std::int32_t> scratch(v.size());
  CHECK(count_inversions(v, scratch) == 3);
  CHECK(std::is_sorted(v.begin(), v.end()));
  std::vector<std::int32_t> rev{5, 4, 3, 2, 1};
  CHECK(count_inversions(rev, scratch) == 10);
}

TEST_CASE("kendall fast path equals the quadratic oracle on 100 random cases") {
  Rng rng(77);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 2 + rng.below(150);
    const auto x = sample_uniform(n, rng);
    const auto y = sample_uniform(n, rng);
    CHECK(kendall_tau(x, y) == doctest::Approx(xicorr::testing::naive_kendall(x, y)).epsilon(1e-15));
  }
}

TEST_CASE("rank statistics are invariant under monotone maps") {
  const auto d = gaussian_data(64, 7, 21);
  DataMatrix t(64, 7);
  for (std::size_t j = 0; j < 7; ++j)
    for (std::size_t i = 0; i < 64; ++i) t(i, j) = j % 2 ? std::exp(d(i, j)) : std::atan(d(i, j)) * 3 - 1;
  for (auto kind : {0, 1, 2}) {
    const Matrix a = kind == 0 ? xi_matrix(d).values : kind == 1 ? spearman_matrix(d).values : kendall_matrix(d).values;
    const Matrix b = kind == 0 ? xi_matrix(t).values : kind == 1 ? spearman_matrix(t).values : kendall_matrix(t).values;
    for (std::size_t k = 0; k < a.data().size(); ++k) CHECK(std::abs(a.data()[k] - b.data()[k]) <= 1e-12);
  }
}

TEST_CASE("ties under the random policy") {
  const std::vector<double> x{1, 1, 2, 3, 4};
  const std::vector<double> y{5, 3, 2, 2, 1};
  CHECK_THROWS_AS(chatterjee_xi(x, y), Error);
  const double a = chatterjee_xi(x, y, TiePolicy::random(9));
  CHECK(a == chatterjee_xi(x, y, TiePolicy::random(9)));
}
