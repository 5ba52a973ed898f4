#include "xicorr/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xicorr/error.hpp"

namespace xicorr {

Permutation::Permutation(std::vector<std::int32_t> image) : image_(std::move(image)) {
  const auto n = static_cast<std::int32_t>(image_.size());
  if (n == 0) throw Error(ErrorCode::InvalidPermutation, "empty image");
  std::vector<bool> seen(image_.size(), false);
  for (std::int32_t v : image_) {
    if (v < 1 || v > n || seen[v - 1])
      throw Error(ErrorCode::InvalidPermutation, "image is not a bijection of {1..n}");
    seen[v - 1] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::int32_t> image(n);
  std::iota(image.begin(), image.end(), 1);
  return Permutation(std::move(image));
}

Permutation Permutation::reversal(std::size_t n) {
  std::vector<std::int32_t> image(n);
  for (std::size_t k = 0; k < n; ++k) image[k] = static_cast<std::int32_t>(n - k);
  return Permutation(std::move(image));
}

Permutation compose(const Permutation& sigma, const Permutation& tau) {
  if (sigma.size() != tau.size())
    throw Error(ErrorCode::SizeMismatch, "compose: permutations of different size");
  std::vector<std::int32_t> image(sigma.size());
  for (std::size_t k = 0; k < image.size(); ++k) image[k] = sigma.image_[tau.image_[k] - 1];
  return Permutation(std::move(image), Permutation::Unchecked{});
}

Permutation inverse(const Permutation& sigma) {
  std::vector<std::int32_t> image(sigma.size());
  for (std::size_t k = 0; k < image.size(); ++k)
    image[sigma.image_[k] - 1] = static_cast<std::int32_t>(k + 1);
  return Permutation(std::move(image), Permutation::Unchecked{});
}

Permutation relative_rank(const Permutation& rank_i, const Permutation& rank_j) {
  if (rank_i.size() != rank_j.size())
    throw Error(ErrorCode::SizeMismatch, "relative_rank: permutations of different size");
  return compose(rank_j, inverse(rank_i));
}

Permutation ranks_from_order(std::span<const std::int32_t> order) {
  std::vector<std::int32_t> image(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) image[order[r]] = static_cast<std::int32_t>(r + 1);
  return Permutation(std::move(image), Permutation::Unchecked{});
}

Permutation ranks_of(std::span<const double> sample, TiePolicy ties) {
  const std::size_t n = sample.size();
  if (n < 2) throw Error(ErrorCode::InvalidSample, "ranking needs at least 2 values");
  for (double v : sample)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidSample, "non-finite value");

  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::int32_t a, std::int32_t b) { return sample[a] < sample[b]; });

  bool tied = false;
  for (std::size_t r = 1; r < n; ++r) {
    if (sample[order[r]] == sample[order[r - 1]]) {
      tied = true;
      break;
    }
  }
  if (tied) {
    if (ties.kind == TiePolicy::Kind::error)
      throw Error(ErrorCode::TiesPresent, "sample contains tied values");
    Rng rng(ties.seed);
    std::vector<std::uint64_t> key(n);
    for (auto& k : key) k = rng();
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      if (sample[a] != sample[b]) return sample[a] < sample[b];
      return key[a] != key[b] ? key[a] < key[b] : a < b;
    });
  }
  return ranks_from_order(order);
}

Permutation sample_uniform(std::size_t n, Rng& rng) {
  std::vector<std::int32_t> image(n);
  std::iota(image.begin(), image.end(), 1);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(image[i - 1], image[j]);
  }
  return Permutation(std::move(image), Permutation::Unchecked{});
}

void DependenceGraph::validate() const {
  for (const auto& [u, v] : edges) {
    if (u == v) throw Error(ErrorCode::InvalidArgument, "dependence graph has a self-loop");
    if (u < 1 || v < 1 || u > vertex_count || v > vertex_count)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint outside 1..vertex_count");
  }
}

bool is_independent_family(const DependenceGraph& graph) {
  graph.validate();
  std::vector<std::size_t> parent(graph.vertex_count + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Any edge closing a cycle, including a parallel or opposite copy, breaks the forest.
  for (const auto& [u, v] : graph.edges) {
    const std::size_t ru = find(u);
    const std::size_t rv = find(v);
    if (ru == rv) return false;
    parent[ru] = rv;
  }
  return true;
}

std::vector<Permutation> enumerate_all(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "enumerate_all: n must be positive");
  if (n > 8) throw Error(ErrorCode::EnumerationTooLarge, "enumerate_all: n > 8");
  std::vector<std::int32_t> image(n);
  std::iota(image.begin(), image.end(), 1);
  std::vector<Permutation> all;
  do {
    all.emplace_back(image);
  } while (std::next_permutation(image.begin(), image.end()));
  return all;
}

}  // namespace xicorr
