#include "xicorr/rankcorr.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "xicorr/error.hpp"
#include "xicorr/simd.hpp"

namespace xicorr {
namespace {

// order[r] = 0-based index of the observation with rank r + 1.
std::vector<std::int32_t> sorting_order(const Permutation& ranks) {
  std::vector<std::int32_t> order(ranks.size());
  const auto image = ranks.image();
  for (std::size_t k = 0; k < image.size(); ++k) order[image[k] - 1] = static_cast<std::int32_t>(k);
  return order;
}

void check_same_size(std::span<const Permutation> ranks) {
  if (ranks.size() < 2) throw Error(ErrorCode::InvalidSample, "need at least 2 variables");
  for (const auto& r : ranks)
    if (r.size() != ranks.front().size())
      throw Error(ErrorCode::SizeMismatch, "rank vectors of different length");
}

double xi_from_step_sum(std::int64_t steps, std::size_t n) {
  const double nn = static_cast<double>(n);
  return 1.0 - 3.0 * static_cast<double>(steps) / (nn * nn - 1.0);
}

void mirror_upper(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) m(j, i) = m(i, j);
}

}  // namespace

DataMatrix::DataMatrix(std::size_t n, std::size_t p) : n_(n), p_(p), values_(n * p, 0.0) {
  if (n < 3 || p < 2) throw Error(ErrorCode::InvalidSample, "data matrix needs n >= 3 and p >= 2");
}

DataMatrix DataMatrix::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw Error(ErrorCode::InvalidSample, "no columns");
  DataMatrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != m.n_) throw Error(ErrorCode::SizeMismatch, "ragged columns");
    std::copy(columns[j].begin(), columns[j].end(), m.column(j).begin());
  }
  m.validate();
  return m;
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidSample, "no rows");
  DataMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.p_) throw Error(ErrorCode::SizeMismatch, "ragged rows");
    for (std::size_t j = 0; j < m.p_; ++j) m(i, j) = rows[i][j];
  }
  m.validate();
  return m;
}

void DataMatrix::validate() const {
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidSample, "non-finite entry in data matrix");
}

std::string_view to_string(CorrelationKind kind) noexcept {
  switch (kind) {
    case CorrelationKind::xi: return "xi";
    case CorrelationKind::phi: return "phi";
    case CorrelationKind::psi: return "psi";
    case CorrelationKind::spearman: return "spearman";
    case CorrelationKind::kendall: return "kendall";
    case CorrelationKind::pearson: return "pearson";
  }
  return "unknown";
}

double f_xi(const Permutation& sigma) {
  const auto image = sigma.image();
  std::int64_t steps = 0;
  for (std::size_t k = 0; k + 1 < image.size(); ++k) steps += std::abs(image[k + 1] - image[k]);
  return xi_from_step_sum(steps, image.size());
}

double f_rho(const Permutation& sigma) {
  const auto image = sigma.image();
  const auto n = static_cast<std::int64_t>(image.size());
  std::int64_t ss = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t d = image[k] - (k + 1);
    ss += d * d;
  }
  return 1.0 - 6.0 * static_cast<double>(ss) / static_cast<double>(n * (n * n - 1));
}

double f_tau(const Permutation& sigma) {
  std::vector<std::int32_t> values(sigma.image().begin(), sigma.image().end());
  std::vector<std::int32_t> scratch(values.size());
  const std::int64_t inv = count_inversions(values, scratch);
  const auto n = static_cast<double>(values.size());
  return 1.0 - 4.0 * static_cast<double>(inv) / (n * (n - 1.0));
}

double chatterjee_xi(std::span<const double> x, std::span<const double> y, TiePolicy ties) {
  if (x.size() != y.size()) throw Error(ErrorCode::SizeMismatch, "samples of different length");
  if (x.size() < 3) throw Error(ErrorCode::InvalidSample, "xi needs n >= 3");
  // Same tie-breaking streams as columns 0 and 1 of column_ranks.
  TiePolicy ties_x = ties, ties_y = ties;
  ties_x.seed = splitmix64(ties.seed);
  ties_y.seed = splitmix64(ties.seed + 1);
  const Permutation rx = ranks_of(x, ties_x);
  const Permutation ry = ranks_of(y, ties_y);
  return f_xi(relative_rank(rx, ry));
}

std::vector<Permutation> column_ranks(const DataMatrix& data, TiePolicy ties) {
  std::vector<Permutation> ranks;
  ranks.reserve(data.p());
  for (std::size_t j = 0; j < data.p(); ++j) {
    TiePolicy column_ties = ties;
    column_ties.seed = splitmix64(ties.seed + j);
    ranks.push_back(ranks_of(data.column(j), column_ties));
  }
  return ranks;
}

CorrelationMatrix xi_matrix(const DataMatrix& data, TiePolicy ties) {
  const auto ranks = column_ranks(data, ties);
  return xi_matrix_from_ranks(ranks);
}

CorrelationMatrix xi_matrix_from_ranks(std::span<const Permutation> ranks) {
  check_same_size(ranks);
  const std::size_t p = ranks.size();
  const std::size_t n = ranks.front().size();
  Matrix xi(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto order = sorting_order(ranks[i]);
    for (std::size_t j = 0; j < p; ++j) {
      if (i == j) {
        xi(i, j) = 1.0;
        continue;
      }
      xi(i, j) = xi_from_step_sum(simd::gathered_abs_step_sum(ranks[j].image(), order), n);
    }
  }
  return {CorrelationKind::xi, std::move(xi)};
}

CorrelationMatrix phi_matrix(const CorrelationMatrix& xi) {
  if (xi.kind != CorrelationKind::xi) throw Error(ErrorCode::InvalidArgument, "phi_matrix expects a xi matrix");
  const std::size_t p = xi.dimension();
  Matrix phi(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    phi(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) phi(i, j) = 0.5 * (xi(i, j) + xi(j, i));
  }
  mirror_upper(phi);
  return {CorrelationKind::phi, std::move(phi)};
}

CorrelationMatrix psi_matrix(const CorrelationMatrix& xi) {
  if (xi.kind != CorrelationKind::xi) throw Error(ErrorCode::InvalidArgument, "psi_matrix expects a xi matrix");
  Matrix deviation = xi.values;
  for (std::size_t i = 0; i < deviation.rows(); ++i) deviation(i, i) -= 1.0;
  return {CorrelationKind::psi, gram(deviation)};
}

CorrelationMatrix pearson_matrix(const DataMatrix& data) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  Matrix z(p, n);  // standardized columns as rows
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = data.column(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    if (!(ss > 0.0)) throw Error(ErrorCode::DegenerateColumn, "column " + std::to_string(j) + " has zero variance");
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t i = 0; i < n; ++i) z(j, i) = (col[i] - mean) * inv;
  }
  Matrix r(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) r(i, j) = simd::dot(z.row(i), z.row(j));
  }
  mirror_upper(r);
  return {CorrelationKind::pearson, std::move(r)};
}

CorrelationMatrix spearman_matrix(const DataMatrix& data, TiePolicy ties) {
  const auto ranks = column_ranks(data, ties);
  return spearman_matrix_from_ranks(ranks);
}

CorrelationMatrix spearman_matrix_from_ranks(std::span<const Permutation> ranks) {
  check_same_size(ranks);
  const std::size_t p = ranks.size();
  const std::size_t n = ranks.front().size();
  const double mid = 0.5 * (static_cast<double>(n) + 1.0);
  const double nn = static_cast<double>(n);
  const double ss = nn * (nn * nn - 1.0) / 12.0;
  Matrix centered(p, n);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < n; ++k) centered(j, k) = ranks[j].image()[k] - mid;
  Matrix s(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    s(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) s(i, j) = simd::dot(centered.row(i), centered.row(j)) / ss;
  }
  mirror_upper(s);
  return {CorrelationKind::spearman, std::move(s)};
}

std::int64_t count_inversions(std::span<std::int32_t> values, std::span<std::int32_t> scratch) {
  const std::size_t n = values.size();
  if (n < 2) return 0;
  std::int64_t inversions = 0;
  // Bottom-up merge sort, ping-ponging between the two buffers.
  std::span<std::int32_t> from = values;
  std::span<std::int32_t> to = scratch;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t a = lo, b = mid, out = lo;
      while (a < mid && b < hi) {
        if (from[b] < from[a]) {
          inversions += static_cast<std::int64_t>(mid - a);
          to[out++] = from[b++];
        } else {
          to[out++] = from[a++];
        }
      }
      while (a < mid) to[out++] = from[a++];
      while (b < hi) to[out++] = from[b++];
    }
    std::swap(from, to);
  }
  if (from.data() != values.data()) std::copy(from.begin(), from.end(), values.begin());
  return inversions;
}

double kendall_tau(const Permutation& rank_x, const Permutation& rank_y) {
  if (rank_x.size() != rank_y.size()) throw Error(ErrorCode::SizeMismatch, "rank vectors of different length");
  const auto order = sorting_order(rank_x);
  std::vector<std::int32_t> seq(order.size());
  std::vector<std::int32_t> scratch(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) seq[k] = rank_y.image()[order[k]];
  const auto n = static_cast<double>(seq.size());
  return 1.0 - 4.0 * static_cast<double>(count_inversions(seq, scratch)) / (n * (n - 1.0));
}

CorrelationMatrix kendall_matrix(const DataMatrix& data, TiePolicy ties) {
  const auto ranks = column_ranks(data, ties);
  return kendall_matrix_from_ranks(ranks);
}

CorrelationMatrix kendall_matrix_from_ranks(std::span<const Permutation> ranks) {
  check_same_size(ranks);
  const std::size_t p = ranks.size();
  const std::size_t n = ranks.front().size();
  const double pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  Matrix k(p, p);
  std::vector<std::int32_t> seq(n), scratch(n);
  for (std::size_t i = 0; i < p; ++i) {
    k(i, i) = 1.0;
    const auto order = sorting_order(ranks[i]);
    for (std::size_t j = i + 1; j < p; ++j) {
      const auto image = ranks[j].image();
      for (std::size_t t = 0; t < n; ++t) seq[t] = image[order[t]];
      k(i, j) = 1.0 - 4.0 * static_cast<double>(count_inversions(seq, scratch)) / pairs;
    }
  }
  mirror_upper(k);
  return {CorrelationKind::kendall, std::move(k)};
}

}  // namespace xicorr
