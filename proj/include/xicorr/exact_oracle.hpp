#pragma once

// Exact enumeration over ranking tuples. Every rank-measurable quantity under
// complete independence is an average over independent uniform rankings, so
// small-n expectations can be computed exactly in rational arithmetic.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xicorr/permutation.hpp"
#include "xicorr/rational.hpp"

namespace xicorr::oracle {

struct OracleReport {
  std::string quantity;
  Rational exact;
  Rational reference;
  bool match = false;
};

OracleReport make_report(std::string quantity, Rational exact, Rational reference);

/// Chatterjee's xi between two samples with the given rankings, exactly.
Rational xi_exact(const Permutation& rank_i, const Permutation& rank_j);

using TupleFunction = std::function<Rational(std::span<const Permutation>)>;

/// (1/(n!)^p) sum over all ranking tuples of f. Throws EnumerationTooLarge
/// when (n!)^p > 10^7.
Rational oracle_expectation(const TupleFunction& f, std::size_t n, std::size_t p);

/// (1/n!) sum over S_n of f; valid for pairwise quantities that depend only on
/// a relative rank, which is itself uniform.
Rational permutation_expectation(const std::function<Rational(const Permutation&)>& f,
                                 std::size_t n);

/// E[prod of squared-pair sums] = 5/16384 and the product of marginals = 1/4096 at n = 3.
std::pair<OracleReport, OracleReport> verify_counterexample();

/// The six rows of the arrow table for a uniform permutation on [n], 4 <= n <= 8.
std::vector<OracleReport> verify_arrow_probabilities(std::size_t n);

/// Enumerated E tr(Psi_n) against the closed form.
OracleReport verify_mean_tr_psi(std::size_t n, std::size_t p);

/// Limit of E[J^3] at n = 3: (1/2) E[phi12 phi23 phi13] / (Var + Cov) = 5/2752,
/// with Var[(Xi12)^2] from its closed form and the other terms enumerated.
OracleReport verify_jxi_third_moment();

/// Components of the third-moment computation, for inspection.
struct ThirdMomentParts {
  Rational mean_xi_sq;
  Rational var_xi_sq;             // closed form
  Rational var_xi_sq_enumerated;
  Rational cov_xi_sq_pair;        // Cov[(Xi12)^2, (Xi21)^2], enumerated
  Rational joint_phi;             // E[phi12 phi23 phi13]
  Rational mean_phi;              // E[phi12]
  Rational ratio;                 // uses var_xi_sq
  Rational ratio_enumerated;      // uses var_xi_sq_enumerated
};
ThirdMomentParts jxi_third_moment_parts();

enum class LawKey { permutation, f_xi };

/// Whether the joint law of the edge family {key(R_v o R_u^{-1})} equals the
/// product of its marginals, by enumeration over all ranking tuples.
bool relative_ranks_factorize(std::size_t n, const DependenceGraph& graph, LawKey key);

/// For each edge set: exact factorization of the f_xi images compared with
/// is_independent_family. exact/reference hold 1 (factorizes / predicted
/// independent) or 0.
std::vector<OracleReport> verify_tree_independence(std::size_t n,
                                                   const std::vector<DependenceGraph>& edge_sets);

/// E[Xi^2], Var(sqrt(n) Xi) and Var(Xi^2) against the closed forms, through the
/// full pair enumeration and through the single-permutation reduction.
std::vector<OracleReport> verify_bivariate_moments(std::size_t n);

/// E[Xi_12] = 0, and E[Xi_12^k] for k = 3, 5 through the pair enumeration
/// against the single-permutation reduction. Only the first moment vanishes.
std::vector<OracleReport> verify_odd_moments(std::size_t n);

/// Named suites: all, counterexample, arrow, mean_tr_psi, jxi, tree, moments.
/// Throws InvalidArgument for an unknown name.
std::vector<OracleReport> verify_suite(std::string_view suite);

/// `quantity, exact, reference, MATCH|MISMATCH`
std::string format_report(const OracleReport& report);

}  // namespace xicorr::oracle
