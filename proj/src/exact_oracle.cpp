#include "xicorr/exact_oracle.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "xicorr/error.hpp"
#include "xicorr/limitlaws.hpp"

namespace xicorr::oracle {
namespace {

constexpr double kTupleGuard = 1e7;

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

/// Calls visit(tuple) for every p-tuple of permutations of [n].
template <typename Visit>
void for_each_tuple(std::size_t n, std::size_t p, Visit&& visit) {
  if (std::pow(factorial(n), static_cast<double>(p)) > kTupleGuard)
    throw Error(ErrorCode::EnumerationTooLarge, "(n!)^p exceeds the enumeration guard");
  const auto all = enumerate_all(n);
  std::vector<std::size_t> index(p, 0);
  std::vector<Permutation> tuple(p, all.front());
  while (true) {
    for (std::size_t j = 0; j < p; ++j) tuple[j] = all[index[j]];
    visit(std::span<const Permutation>(tuple));
    std::size_t j = 0;
    while (j < p && ++index[j] == all.size()) index[j++] = 0;
    if (j == p) break;
  }
}

Rational tuple_count(std::size_t n, std::size_t p) {
  BigInt f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<unsigned long>(k);
  BigInt total = 1;
  for (std::size_t j = 0; j < p; ++j) total *= f;
  return Rational(total);
}

Rational power(const Rational& x, unsigned k) {
  Rational r = 1;
  for (unsigned i = 0; i < k; ++i) r *= x;
  return r;
}

Rational f_xi_exact(const Permutation& sigma) {
  const std::size_t n = sigma.size();
  long sum = 0;
  for (std::size_t k = 1; k < n; ++k) sum += std::abs(sigma(k + 1) - sigma(k));
  const long nn = static_cast<long>(n);
  return 1 - make_rational(3 * sum, nn * nn - 1);
}

std::string label(std::string_view base, std::size_t n) {
  return std::string(base) + " n=" + std::to_string(n);
}

std::string label(std::string_view base, std::size_t n, std::size_t p) {
  return std::string(base) + " n=" + std::to_string(n) + " p=" + std::to_string(p);
}

std::string edge_list(const DependenceGraph& g) {
  std::string s = "{";
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (e) s += ' ';
    s += "(" + std::to_string(g.edges[e].first) + "," + std::to_string(g.edges[e].second) + ")";
  }
  return s + "}";
}

}  // namespace

OracleReport make_report(std::string quantity, Rational exact, Rational reference) {
  const bool match = exact == reference;
  return {std::move(quantity), std::move(exact), std::move(reference), match};
}

Rational xi_exact(const Permutation& rank_i, const Permutation& rank_j) {
  return f_xi_exact(relative_rank(rank_i, rank_j));
}

Rational oracle_expectation(const TupleFunction& f, std::size_t n, std::size_t p) {
  Rational sum = 0;
  for_each_tuple(n, p, [&](std::span<const Permutation> t) { sum += f(t); });
  return sum / tuple_count(n, p);
}

Rational permutation_expectation(const std::function<Rational(const Permutation&)>& f, std::size_t n) {
  Rational sum = 0;
  const auto all = enumerate_all(n);
  for (const auto& sigma : all) sum += f(sigma);
  return sum / Rational(static_cast<unsigned long>(all.size()));
}

std::pair<OracleReport, OracleReport> verify_counterexample() {
  auto pair_sum = [](std::span<const Permutation> t, std::size_t i, std::size_t j) -> Rational {
    return power(xi_exact(t[i], t[j]), 2) + power(xi_exact(t[j], t[i]), 2);
  };
  const Rational joint = oracle_expectation(
      [&](std::span<const Permutation> t) -> Rational { return pair_sum(t, 0, 1) * pair_sum(t, 0, 2) * pair_sum(t, 1, 2); },
      3, 3);
  Rational product = 1;
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}})
    product *= oracle_expectation([&](std::span<const Permutation> t) -> Rational { return pair_sum(t, i, j); }, 3, 3);
  return {make_report("E[prod of pair sums] n=3", joint, Rational(5, 16384)),
          make_report("prod of E[pair sum] n=3", product, Rational(1, 4096))};
}

std::vector<OracleReport> verify_arrow_probabilities(std::size_t n) {
  if (n < 4 || n > 8) throw Error(ErrorCode::EnumerationTooLarge, "arrow table needs 4 <= n <= 8");
  struct Row {
    const char* name;
    bool (*event)(const Permutation&);
    Rational reference;
  };
  const long nn = static_cast<long>(n);
  const Rational pair = make_rational(1, nn * (nn - 1));
  const Row rows[] = {
      {"P(s1+1=s2, s3+1=s4)", [](const Permutation& s) { return s(1) + 1 == s(2) && s(3) + 1 == s(4); }, pair},
      {"P(s1+1=s2, s2+1=s3)", [](const Permutation& s) { return s(1) + 1 == s(2) && s(2) + 1 == s(3); }, pair},
      {"P(s1+1=s2)", [](const Permutation& s) { return s(1) + 1 == s(2); }, make_rational(1, nn)},
      {"P(s1+1=s2, s1+1=s3)", [](const Permutation& s) { return s(1) + 1 == s(2) && s(1) + 1 == s(3); }, 0},
      {"P(s1+1=s3, s2+1=s3)", [](const Permutation& s) { return s(1) + 1 == s(3) && s(2) + 1 == s(3); }, 0},
      {"P(s1+1=s2, s2+1=s1)", [](const Permutation& s) { return s(1) + 1 == s(2) && s(2) + 1 == s(1); }, 0},
  };
  std::vector<OracleReport> out;
  for (const auto& row : rows) {
    const Rational prob = permutation_expectation(
        [&](const Permutation& s) -> Rational { return Rational(row.event(s) ? 1 : 0); }, n);
    out.push_back(make_report(label(row.name, n), prob, row.reference));
  }
  return out;
}

OracleReport verify_mean_tr_psi(std::size_t n, std::size_t p) {
  const Rational mean = oracle_expectation(
      [&](std::span<const Permutation> t) -> Rational {
        Rational tr = 0;
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t j = 0; j < p; ++j)
            if (i != j) tr += power(xi_exact(t[i], t[j]), 2);
        return tr;
      },
      n, p);
  return make_report(label("E tr(Psi)", n, p), mean, exact_mean_tr_psi(n, p));
}

ThirdMomentParts jxi_third_moment_parts() {
  constexpr std::size_t n = 3;
  ThirdMomentParts parts;
  auto sq = [](std::span<const Permutation> t, std::size_t i, std::size_t j) -> Rational {
    return power(xi_exact(t[i], t[j]), 2);
  };
  parts.mean_xi_sq = oracle_expectation([&](std::span<const Permutation> t) -> Rational { return sq(t, 0, 1); }, n, 2);
  const Rational m = parts.mean_xi_sq;
  parts.var_xi_sq = exact_var_xi_sq(n);
  parts.var_xi_sq_enumerated =
      oracle_expectation([&](std::span<const Permutation> t) -> Rational { return power(sq(t, 0, 1), 2); }, n, 2) - m * m;
  parts.cov_xi_sq_pair =
      oracle_expectation([&](std::span<const Permutation> t) -> Rational { return sq(t, 0, 1) * sq(t, 1, 0); }, n, 2) - m * m;
  auto phi = [&](std::span<const Permutation> t, std::size_t i, std::size_t j) -> Rational {
    return sq(t, i, j) + sq(t, j, i) - 2 * m;
  };
  parts.joint_phi = oracle_expectation(
      [&](std::span<const Permutation> t) -> Rational { return phi(t, 0, 1) * phi(t, 1, 2) * phi(t, 0, 2); }, n, 3);
  parts.mean_phi = oracle_expectation([&](std::span<const Permutation> t) -> Rational { return phi(t, 0, 1); }, n, 2);
  parts.ratio = parts.joint_phi / (2 * (parts.var_xi_sq + parts.cov_xi_sq_pair));
  parts.ratio_enumerated = parts.joint_phi / (2 * (parts.var_xi_sq_enumerated + parts.cov_xi_sq_pair));
  return parts;
}

OracleReport verify_jxi_third_moment() {
  return make_report("lim E[J^3] n=3", jxi_third_moment_parts().ratio, Rational(5, 2752));
}

bool relative_ranks_factorize(std::size_t n, const DependenceGraph& graph, LawKey key) {
  graph.validate();
  const std::size_t m = graph.edges.size();
  if (m == 0) return true;
  if (n > 4 || graph.vertex_count > 4)
    throw Error(ErrorCode::EnumerationTooLarge, "factorization check needs n <= 4 and at most 4 vertices");

  // Outcomes are encoded per edge as small integer ids.
  std::vector<std::map<std::string, std::size_t>> ids(m);
  std::map<std::vector<std::size_t>, long> joint;
  std::vector<std::map<std::size_t, long>> marginal(m);
  long total = 0;
  std::vector<std::size_t> outcome(m);
  for_each_tuple(n, graph.vertex_count, [&](std::span<const Permutation> t) {
    for (std::size_t e = 0; e < m; ++e) {
      const auto [u, v] = graph.edges[e];
      const Permutation rel = relative_rank(t[u - 1], t[v - 1]);
      std::string k;
      if (key == LawKey::permutation) {
        for (auto x : rel.image()) k += std::to_string(x) + ",";
      } else {
        k = f_xi_exact(rel).get_str();
      }
      outcome[e] = ids[e].try_emplace(k, ids[e].size()).first->second;
      ++marginal[e][outcome[e]];
    }
    ++joint[outcome];
    ++total;
  });

  // Compare P(joint) with the product of marginals on the full product support.
  std::vector<std::size_t> cursor(m, 0);
  while (true) {
    Rational product = 1;
    for (std::size_t e = 0; e < m; ++e) product *= make_rational(marginal[e][cursor[e]], total);
    const auto it = joint.find(cursor);
    const Rational observed = it == joint.end() ? Rational(0) : make_rational(it->second, total);
    if (observed != product) return false;
    std::size_t e = 0;
    while (e < m && ++cursor[e] == ids[e].size()) cursor[e++] = 0;
    if (e == m) break;
  }
  return true;
}

std::vector<OracleReport> verify_tree_independence(std::size_t n, const std::vector<DependenceGraph>& edge_sets) {
  std::vector<OracleReport> out;
  for (const auto& g : edge_sets) {
    const bool factorizes = relative_ranks_factorize(n, g, LawKey::f_xi);
    const bool predicted = is_independent_family(g);
    out.push_back(make_report(label("factorizes " + edge_list(g), n), factorizes ? 1 : 0, predicted ? 1 : 0));
  }
  return out;
}

std::vector<OracleReport> verify_bivariate_moments(std::size_t n) {
  const Rational mean_sq = exact_mean_xi_sq(n);
  const Rational var_sqrtn = exact_var_sqrtn_xi(n);
  const Rational var_sq = exact_var_xi_sq(n);
  const Rational nn = static_cast<unsigned long>(n);

  auto pair_moment = [&](unsigned k) {
    return oracle_expectation([&](std::span<const Permutation> t) -> Rational { return power(xi_exact(t[0], t[1]), k); }, n, 2);
  };
  auto reduced_moment = [&](unsigned k) {
    return permutation_expectation([&](const Permutation& s) -> Rational { return power(f_xi_exact(s), k); }, n);
  };

  std::vector<OracleReport> out;
  for (const auto& [route, moment] :
       {std::pair<std::string, std::function<Rational(unsigned)>>{"pairs", pair_moment}, {"relative rank", reduced_moment}}) {
    const Rational m1 = moment(1);
    const Rational m2 = moment(2);
    const Rational m4 = moment(4);
    out.push_back(make_report(label("E[Xi^2] (" + route + ")", n), m2, mean_sq));
    out.push_back(make_report(label("Var(sqrt(n) Xi) (" + route + ")", n), nn * (m2 - m1 * m1), var_sqrtn));
    out.push_back(make_report(label("Var(Xi^2) (" + route + ")", n), m4 - m2 * m2, var_sq));
  }
  return out;
}

std::vector<OracleReport> verify_odd_moments(std::size_t n) {
  std::vector<OracleReport> out;
  auto pair_moment = [&](unsigned k) {
    return oracle_expectation([&](std::span<const Permutation> t) -> Rational { return power(xi_exact(t[0], t[1]), k); }, n, 2);
  };
  auto reduced_moment = [&](unsigned k) {
    return permutation_expectation([&](const Permutation& s) -> Rational { return power(f_xi_exact(s), k); }, n);
  };
  out.push_back(make_report(label("E[Xi]", n), pair_moment(1), 0));
  for (unsigned k : {3u, 5u})
    out.push_back(make_report(label("E[Xi^" + std::to_string(k) + "] pairs vs relative rank", n), pair_moment(k),
                              reduced_moment(k)));
  return out;
}

std::vector<OracleReport> verify_suite(std::string_view suite) {
  const bool all = suite == "all";
  bool known = all;
  std::vector<OracleReport> out;
  auto append = [&](std::vector<OracleReport> more) {
    for (auto& r : more) out.push_back(std::move(r));
  };
  if (all || suite == "counterexample") {
    known = true;
    auto [joint, product] = verify_counterexample();
    out.push_back(std::move(joint));
    out.push_back(std::move(product));
  }
  if (all || suite == "arrow") {
    known = true;
    for (std::size_t n : {4, 5, 6}) append(verify_arrow_probabilities(n));
  }
  if (all || suite == "mean_tr_psi") {
    known = true;
    for (auto [n, p] : {std::pair<std::size_t, std::size_t>{3, 2}, {4, 2}, {5, 2}, {3, 3}})
      out.push_back(verify_mean_tr_psi(n, p));
  }
  if (all || suite == "jxi") {
    known = true;
    out.push_back(verify_jxi_third_moment());
  }
  if (all || suite == "tree") {
    known = true;
    append(verify_tree_independence(3, {DependenceGraph{3, {{1, 2}, {1, 3}}}, DependenceGraph{3, {{1, 2}, {2, 3}}},
                                        DependenceGraph{3, {{1, 2}, {2, 3}, {3, 1}}}}));
  }
  if (all || suite == "moments") {
    known = true;
    for (std::size_t n : {3, 4, 5}) append(verify_bivariate_moments(n));
    for (std::size_t n : {3, 4}) append(verify_odd_moments(n));
  }
  if (!known) throw Error(ErrorCode::InvalidArgument, "unknown oracle suite '" + std::string(suite) + "'");
  return out;
}

std::string format_report(const OracleReport& report) {
  std::ostringstream s;
  s << report.quantity << ", " << report.exact.get_str() << ", " << report.reference.get_str() << ", "
    << (report.match ? "MATCH" : "MISMATCH");
  return s.str();
}

}  // namespace xicorr::oracle
