#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "xicorr/matrix.hpp"
#include "xicorr/permutation.hpp"

namespace xicorr {

/// n observations of p variables, stored column by column.
class DataMatrix {
 public:
  /// Zero-filled n x p matrix; throws InvalidSample unless n >= 3 and p >= 2.
  DataMatrix(std::size_t n, std::size_t p);
  /// `columns[j]` holds variable j. Validates shape and finiteness.
  static DataMatrix from_columns(const std::vector<std::vector<double>>& columns);
  /// `rows[i]` holds observation i. Validates shape and finiteness.
  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return p_; }

  std::span<const double> column(std::size_t j) const noexcept { return {values_.data() + j * n_, n_}; }
  std::span<double> column(std::size_t j) noexcept { return {values_.data() + j * n_, n_}; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[j * n_ + i]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[j * n_ + i]; }

  /// Throws InvalidSample if any entry is non-finite.
  void validate() const;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> values_;
};

enum class CorrelationKind { xi, phi, psi, spearman, kendall, pearson };

std::string_view to_string(CorrelationKind kind) noexcept;

struct CorrelationMatrix {
  CorrelationKind kind;
  Matrix values;

  std::size_t dimension() const noexcept { return values.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values(i, j); }
};

// Functionals of a single permutation.
double f_xi(const Permutation& sigma);
double f_rho(const Permutation& sigma);
double f_tau(const Permutation& sigma);

/// Chatterjee's xi_n(x, y); not symmetric in its arguments.
double chatterjee_xi(std::span<const double> x, std::span<const double> y,
                     TiePolicy ties = TiePolicy::error());

/// Rank permutation of every column.
std::vector<Permutation> column_ranks(const DataMatrix& data, TiePolicy ties = TiePolicy::error());

/// Xi_n: unit diagonal, (i, j) entry xi_n(column i, column j).
CorrelationMatrix xi_matrix(const DataMatrix& data, TiePolicy ties = TiePolicy::error());
CorrelationMatrix xi_matrix_from_ranks(std::span<const Permutation> ranks);

/// (Xi + Xi^T) / 2 with the diagonal set to exactly 1.
CorrelationMatrix phi_matrix(const CorrelationMatrix& xi);
/// (Xi - I)(Xi - I)^T.
CorrelationMatrix psi_matrix(const CorrelationMatrix& xi);

CorrelationMatrix pearson_matrix(const DataMatrix& data);
CorrelationMatrix spearman_matrix(const DataMatrix& data, TiePolicy ties = TiePolicy::error());
CorrelationMatrix spearman_matrix_from_ranks(std::span<const Permutation> ranks);
CorrelationMatrix kendall_matrix(const DataMatrix& data, TiePolicy ties = TiePolicy::error());
CorrelationMatrix kendall_matrix_from_ranks(std::span<const Permutation> ranks);

/// Number of pairs k < l with values[k] > values[l], by merge sort. `values`
/// is reordered; `scratch` must have the same length.
std::int64_t count_inversions(std::span<std::int32_t> values, std::span<std::int32_t> scratch);

/// Kendall's tau between two rank vectors, O(n log n).
double kendall_tau(const Permutation& rank_x, const Permutation& rank_y);

}  // namespace xicorr
