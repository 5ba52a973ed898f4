#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "xicorr/rng.hpp"

namespace xicorr {

/// Bijection of {1..n}. The public contract is 1-based: operator()(k) = sigma(k)
/// for k in 1..n, and image()[k-1] = sigma(k).
class Permutation {
 public:
  /// Validates that `image` is a bijection of {1..n}.
  explicit Permutation(std::vector<std::int32_t> image);

  static Permutation identity(std::size_t n);
  /// sigma(k) = n + 1 - k
  static Permutation reversal(std::size_t n);

  std::size_t size() const noexcept { return image_.size(); }
  std::int32_t operator()(std::size_t k) const noexcept { return image_[k - 1]; }
  std::span<const std::int32_t> image() const noexcept { return image_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  struct Unchecked {};
  Permutation(std::vector<std::int32_t> image, Unchecked) : image_(std::move(image)) {}

  friend Permutation compose(const Permutation&, const Permutation&);
  friend Permutation inverse(const Permutation&);
  friend Permutation sample_uniform(std::size_t, Rng&);
  friend Permutation ranks_from_order(std::span<const std::int32_t>);

  std::vector<std::int32_t> image_;
};

/// (sigma o tau)(k) = sigma(tau(k)).
Permutation compose(const Permutation& sigma, const Permutation& tau);
Permutation inverse(const Permutation& sigma);

/// R_j o R_i^{-1}: the ranks of the second sample listed in the order of the first.
Permutation relative_rank(const Permutation& rank_i, const Permutation& rank_j);

/// Builds ranks from a 0-based sorting order: the element at order[r] gets rank r+1.
Permutation ranks_from_order(std::span<const std::int32_t> order);

struct TiePolicy {
  enum class Kind { error, random };
  Kind kind = Kind::error;
  std::uint64_t seed = 0;

  static TiePolicy error() { return {}; }
  static TiePolicy random(std::uint64_t seed) { return {Kind::random, seed}; }
};

/// R(k) = #{i : sample[i] <= sample[k]}. Under TiePolicy::random, tied values
/// are ordered by an independent uniform key drawn from the policy's seed.
/// Throws TiesPresent (error policy), InvalidSample (n < 2 or non-finite).
Permutation ranks_of(std::span<const double> sample, TiePolicy ties = TiePolicy::error());

/// Fisher-Yates shuffle of the identity.
Permutation sample_uniform(std::size_t n, Rng& rng);

/// Directed multigraph on vertices 1..vertex_count; parallel and opposite
/// edges are allowed, self-loops are not.
struct DependenceGraph {
  std::size_t vertex_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  /// Throws InvalidArgument on self-loops or out-of-range vertices.
  void validate() const;
};

/// True iff the underlying undirected multigraph is a forest. This is exactly
/// when the relative ranks {R_v o R_u^{-1} : (u,v) in edges} of independent
/// uniform rankings are mutually independent.
bool is_independent_family(const DependenceGraph& graph);

/// All n! permutations in lexicographic order of the image. Throws
/// EnumerationTooLarge for n > 8.
std::vector<Permutation> enumerate_all(std::size_t n);

}  // namespace xicorr
