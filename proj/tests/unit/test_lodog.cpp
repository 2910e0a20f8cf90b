#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lapoleaf/lodog.hpp"
#include "support/oracles.hpp"

using namespace lapoleaf;

namespace {

const std::vector<double> kTwoClusters{0.0,  0.04, 0.07, 0.11, 0.15, 0.18, 0.22,
                                       0.26, 0.29, 0.33, 5.0,  5.03, 5.08, 5.12,
                                       5.15, 5.19, 5.24, 5.27, 5.31, 5.36};

Matrix column(const std::vector<double>& xs) {
  Matrix m;
  for (double x : xs) m.append_row(std::span<const double>(&x, 1));
  return m;
}

LeadingTree tree_of(const Matrix& x, double percent, double* d_c_out = nullptr) {
  const auto dm = pairwise_distances(x);
  const double d_c = cutoff_distance(dm, percent);
  if (d_c_out) *d_c_out = d_c;
  return build_leading_tree(dm, local_density(dm, d_c, std::vector<std::size_t>(x.rows(), 1)));
}

void check_forest(const LeadingForest& f, const LeadingTree& t, std::size_t ng) {
  const std::size_t n = t.size();
  REQUIRE(f.size() == n);
  CHECK(f.num_subtrees() == ng);
  CHECK(f.roots.front() == t.root);
  std::size_t total = 0;
  const auto sizes = f.subtree_sizes();
  for (std::size_t s = 0; s < ng; ++s) {
    total += sizes[s];
    CHECK(f.max_layer[s] < sizes[s]);
    CHECK(f.subtree_id[f.roots[s]] == s);
    CHECK(f.layer[f.roots[s]] == 0);
  }
  CHECK(total == n);
  std::vector<std::size_t> child_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.is_root(i)) {
      CHECK(std::find(f.roots.begin(), f.roots.end(), i) != f.roots.end());
      continue;
    }
    CHECK(f.parent[i] == t.ln[i]);
    CHECK(f.subtree_id[i] == f.subtree_id[f.parent[i]]);
    CHECK(f.layer[i] == f.layer[f.parent[i]] + 1);
    CHECK(f.layer[i] <= f.max_layer[f.subtree_id[i]]);
    ++child_count[f.parent[i]];
  }
  for (std::size_t p = 0; p < n; ++p) {
    const auto kids = f.children(p);
    CHECK(kids.size() == child_count[p]);
    CHECK(std::is_sorted(kids.begin(), kids.end()));
    for (std::size_t c : kids) CHECK(f.parent[c] == p);
  }
  REQUIRE(f.bfs_order.size() == n);
  std::vector<std::size_t> seen(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    ++seen[f.bfs_order[k]];
    if (k > 0) CHECK(f.layer[f.bfs_order[k - 1]] <= f.layer[f.bfs_order[k]]);
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](std::size_t c) { return c == 1; }));
}

}  // namespace

TEST_SUITE("lodog") {

TEST_CASE("H kinds") {
  CHECK(HSpec::linear(0.1)(20) == doctest::Approx(2.0));
  CHECK(HSpec{HSpec::Kind::logarithm, 2.0, 1.0, 1.0}(std::exp(1.0)) == doctest::Approx(3.0));
  CHECK(HSpec{HSpec::Kind::power, 1.0, 0.5, 0.0}(16) == doctest::Approx(4.0));
  CHECK(HSpec{HSpec::Kind::exponential, 1.0, 2.0, -1.0}(3) == doctest::Approx(7.0));
  CHECK(HSpec::product(80, 1.001)(10) == doctest::Approx(800 * std::pow(1.001, 10)));
  for (const char* name : {"linear", "logarithm", "power", "exponential", "product"}) {
    CHECK(to_string(h_kind_from_string(name)) == name);
  }
  CHECK_THROWS_AS(h_kind_from_string("cubic"), ValidationError);
}

TEST_CASE("H must be strictly increasing") {
  CHECK_THROWS_AS(HSpec::linear(0).validate(), ValidationError);
  CHECK_THROWS_AS(HSpec::linear(-1).validate(), ValidationError);
  CHECK_THROWS_AS((HSpec{HSpec::Kind::power, 1, 0, 0}).validate(), ValidationError);
  CHECK_THROWS_AS((HSpec{HSpec::Kind::exponential, 1, 1, 0}).validate(), ValidationError);
  CHECK_THROWS_AS(HSpec::product(1, 0.99).validate(), ValidationError);
  CHECK_NOTHROW(HSpec::product(80, 1.001).validate());
  CHECK_NOTHROW(HSpec::product(1, 1).validate());
}

TEST_CASE("default n_max") {
  CHECK(default_n_max(1) == 1);
  CHECK(default_n_max(40) == 40);
  CHECK(default_n_max(100) == 60);
  CHECK(default_n_max(1000) == 82);
  LodogParams p;
  CHECK(p.effective_n_max(100) == 60);
  p.n_max = 500;
  CHECK(p.effective_n_max(100) == 100);
}

TEST_CASE("alpha outside (0,1) is rejected") {
  const auto t = tree_of(column(kTwoClusters), 20);
  CHECK_THROWS_AS(evaluate_objective(t, HSpec::linear(0.1), 0.0, 5), ValidationError);
  CHECK_THROWS_AS(evaluate_objective(t, HSpec::linear(0.1), 1.0, 5), ValidationError);
  CHECK_THROWS_AS(evaluate_objective(t, HSpec::linear(0.1), 0.5, 0), ValidationError);
  CHECK_THROWS_AS(evaluate_objective(t, HSpec::linear(0.1), 0.5, 21), ValidationError);
}

TEST_CASE("curve end points") {
  const auto t = tree_of(column(kTwoClusters), 20);
  const auto h = HSpec::linear(0.3);
  const auto curve = evaluate_objective(t, h, 0.4, 20);
  REQUIRE(curve.q.size() == 20);
  CHECK(curve.q.back() == doctest::Approx(0.4 * h(20)));
  double s = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (j != t.root) s += t.delta[j];
  }
  CHECK(curve.q.front() == doctest::Approx(0.4 * h(1) + 0.6 * s));
}

TEST_CASE("two-cluster fixture") {
  double d_c = 0;
  const auto t = tree_of(column(kTwoClusters), 20, &d_c);
  CHECK(d_c == doctest::Approx(0.11).epsilon(1e-15));
  CHECK(t.root == 5);
  const auto curve = evaluate_objective(t, HSpec::linear(0.1), 0.5, 20);
  CHECK(curve.ng_star == 2);
  CHECK(curve.q[0] == doctest::Approx(2.8600000000000003).epsilon(1e-12));
  CHECK(curve.q[1] == doctest::Approx(0.4450000000000002).epsilon(1e-12));
  CHECK(curve.q[19] == doctest::Approx(1.0).epsilon(1e-12));
  const auto ref = oracle::objective(oracle::tree(column(kTwoClusters), std::vector<std::size_t>(20, 1), d_c),
                                     HSpec::linear(0.1), 0.5, 20);
  for (std::size_t k = 0; k < 20; ++k) CHECK(curve.q[k] == doctest::Approx(ref[k]).epsilon(1e-12));

  const auto f = split_forest(t, curve.ranking, curve.ng_star);
  CHECK(f.roots == std::vector<std::size_t>{5, 14});
  for (std::size_t i = 0; i < 20; ++i) CHECK(f.subtree_id[i] == (i < 10 ? 0u : 1u));
  check_forest(f, t, 2);
}

TEST_CASE("argmin ties go to the smallest granule count") {
  // Hand-built tree: cutting point 1 saves exactly what H charges.
  LeadingTree t;
  t.rho = {3, 2, 1};
  t.delta = {4, 2, 1};
  t.gamma = {12, 4, 1};
  t.ln = {kNoParent, 0, 1};
  t.root = 0;
  const auto curve = evaluate_objective(t, HSpec::linear(2), 0.5, 3);
  CHECK(curve.q[0] == doctest::Approx(curve.q[1]));
  CHECK(curve.ng_star == 1);
}

TEST_CASE("root is forced to the front of the ranking") {
  LeadingTree t;
  t.rho = {3, 1, 2};
  t.delta = {1, 5, 1};
  t.gamma = {3, 5, 2};
  t.ln = {kNoParent, 2, 0};
  t.root = 0;
  const auto r = rank_by_gamma(t);
  CHECK(r.forced_root);
  CHECK(r.order == std::vector<std::size_t>{0, 1, 2});
  const auto f = split_forest(t, r, 2);
  CHECK(f.forced_root);
  CHECK(f.roots == std::vector<std::size_t>{0, 1});

  const auto normal = rank_by_gamma(tree_of(column(kTwoClusters), 20));
  CHECK_FALSE(normal.forced_root);
}

TEST_CASE("gamma ties rank by index") {
  LeadingTree t;
  t.rho = {4, 1, 1, 1};
  t.delta = {9, 2, 2, 2};
  t.gamma = {36, 2, 2, 2};
  t.ln = {kNoParent, 0, 0, 0};
  t.root = 0;
  CHECK(rank_by_gamma(t).order == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("split with one granule and with N granules") {
  const auto t = tree_of(column(kTwoClusters), 20);
  const auto one = split_forest(t, 1);
  CHECK(one.roots == std::vector<std::size_t>{t.root});
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(one.subtree_id[i] == 0);
    if (i != t.root) CHECK(one.parent[i] == t.ln[i]);
  }
  check_forest(one, t, 1);

  const auto all = split_forest(t, t.size());
  CHECK(all.num_subtrees() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(all.layer[i] == 0);
    CHECK(all.is_root(i));
  }
  CHECK_THROWS_AS(split_forest(t, 0), ValidationError);
  CHECK_THROWS_AS(split_forest(t, t.size() + 1), ValidationError);
}

TEST_CASE("curve and forest agree with the oracle on random data") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 5 + rng() % 120;
    const auto data = oracle::random_points(rng, n, 1 + rng() % 4, trial % 3 == 0);
    const auto dm = pairwise_distances(data.features);
    const double d_c = cutoff_distance(dm, 3);
    const auto t = build_leading_tree(dm, local_density(dm, d_c, data.pop));
    const auto ref = oracle::tree(data.features, data.pop, d_c);
    const HSpec h = trial % 2 ? HSpec::linear(0.5) : HSpec{HSpec::Kind::logarithm, 3, 1, 0};
    const double alpha = 0.2 + 0.05 * trial;
    const auto curve = evaluate_objective(t, h, alpha, data.size());
    const auto q = oracle::objective(ref, h, alpha, data.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      CHECK(curve.q[k] == doctest::Approx(q[k]).epsilon(1e-9));
    }
    const auto best = std::min_element(q.begin(), q.end()) - q.begin() + 1;
    CHECK(curve.ng_star == static_cast<std::size_t>(best));

    for (std::size_t ng : {std::size_t{1}, curve.ng_star, data.size() / 2 + 1}) {
      const auto f = split_forest(t, curve.ranking, ng);
      CHECK(f.roots == oracle::gamma_roots(ref, ng));
      const auto member = oracle::membership(ref, f.roots);
      CHECK(f.subtree_id == member);
      check_forest(f, t, ng);
    }
  }
}

TEST_CASE("forest DOT export") {
  const auto t = tree_of(column(kTwoClusters), 20);
  const auto f = split_forest(t, 2);
  std::ostringstream out;
  write_dot(out, f, t);
  const auto s = out.str();
  CHECK(s.find("subgraph cluster_0") != std::string::npos);
  CHECK(s.find("subgraph cluster_1") != std::string::npos);
  CHECK(s.find("subgraph cluster_2") == std::string::npos);
  CHECK(s.find("\xce\xb3=") != std::string::npos);
  CHECK(s.find("5 [label=") != std::string::npos);
  CHECK(s.find("doublecircle") != std::string::npos);

  LeadingTree single;
  single.rho = {0};
  single.delta = {0};
  single.gamma = {0};
  single.ln = {kNoParent};
  std::ostringstream one;
  write_dot(one, split_forest(single, 1), single);
  CHECK(one.str().find("->") == std::string::npos);
  CHECK(one.str().find("0 [label=") != std::string::npos);
}

}
