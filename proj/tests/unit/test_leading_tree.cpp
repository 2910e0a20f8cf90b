#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lapoleaf/leading_tree.hpp"
#include "support/oracles.hpp"

using namespace lapoleaf;

namespace {

Matrix line(std::initializer_list<double> xs) {
  Matrix m;
  for (double x : xs) m.append_row(std::span<const double>(&x, 1));
  return m;
}

std::vector<std::size_t> ones(std::size_t n) { return std::vector<std::size_t>(n, 1); }

}  // namespace

TEST_SUITE("leading_tree") {

TEST_CASE("pairwise distances on a line") {
  const auto dm = pairwise_distances(line({0, 3}));
  CHECK(dm(0, 1) == 3.0);
  CHECK(dm(1, 0) == 3.0);
  CHECK(dm(1, 1) == 0.0);
  CHECK(dm.eval_count() == 1);
}

TEST_CASE("distance evaluations are N(N-1)/2") {
  CHECK(pairwise_distances(line({0, 1, 5, 9})).eval_count() == 6);
  Matrix x(50, 3);
  for (std::size_t i = 0; i < 50; ++i) x(i, i % 3) = double(i);
  CHECK(pairwise_distances(x).eval_count() == 50 * 49 / 2);
}

TEST_CASE("pairwise distances are deterministic") {
  Matrix x(30, 2);
  for (std::size_t i = 0; i < 30; ++i) {
    x(i, 0) = std::sin(double(i));
    x(i, 1) = std::cos(3.0 * double(i));
  }
  const auto a = pairwise_distances(x), b = pairwise_distances(x);
  CHECK(std::equal(a.off_diagonal().begin(), a.off_diagonal().end(), b.off_diagonal().begin(),
                   b.off_diagonal().end()));
}

TEST_CASE("measure and append extend the matrix") {
  const Matrix x = line({0, 1, 4});
  auto dm = pairwise_distances(line({0, 1}));
  const double p = 4;
  const auto d = dm.measure(x, std::span<const double>(&p, 1), Metric::euclidean);
  CHECK(d == std::vector<double>{4, 3});
  CHECK(dm.eval_count() == 3);
  dm.append(d);
  CHECK(dm.size() == 3);
  CHECK(dm(2, 0) == 4);
  CHECK(dm(1, 2) == 3);
}

TEST_CASE("cutoff rank rule") {
  const std::vector<double> d{5, 3, 1, 4, 2};
  CHECK(cutoff_distance(d, 40) == 2);
  CHECK(cutoff_distance(d, 1e-9) == 1);
  CHECK(cutoff_distance(d, 100) == 5);
  CHECK(cutoff_distance(d, 41) == 3);
  const auto dm = pairwise_distances(line({0, 1, 3, 7}));
  CHECK(cutoff_distance(dm, 0.001) == 1);
  CHECK(cutoff_distance(dm, 100) == 7);
  CHECK(cutoff_distance(dm, 50) == 3);
}

TEST_CASE("cutoff rejects bad input") {
  CHECK_THROWS_AS(cutoff_distance(pairwise_distances(line({1})), 5), ValidationError);
  const auto dm = pairwise_distances(line({0, 1}));
  CHECK_THROWS_AS(cutoff_distance(dm, 0), ValidationError);
  CHECK_THROWS_AS(cutoff_distance(dm, 101), ValidationError);
}

TEST_CASE("density of a single point is zero") {
  const auto rho = local_density(pairwise_distances(line({4})), 1.0, ones(1));
  CHECK(rho == std::vector<double>{0.0});
}

TEST_CASE("density of two points at distance d_c") {
  const auto rho = local_density(pairwise_distances(line({0, 2})), 2.0, ones(2));
  CHECK(rho[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(rho[1] == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("density of [0,1,2,10] with d_c 2") {
  const auto rho = local_density(pairwise_distances(line({0, 1, 2, 10})), 2.0, ones(4));
  const std::vector<double> expected{1.1466802242567353, 1.5576015677480377, 1.146680336778022,
                                     1.1415429071830969e-07};
  for (std::size_t i = 0; i < 4; ++i) CHECK(rho[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(std::max_element(rho.begin(), rho.end()) - rho.begin() == 1);
}

TEST_CASE("density counts populations") {
  const auto dm = pairwise_distances(line({0, 1, 3}));
  const std::vector<std::size_t> pop{1, 3, 2};
  const auto rho = local_density(dm, 1.5, pop);
  const auto k = [](double d) { return std::exp(-(d / 1.5) * (d / 1.5)); };
  CHECK(rho[0] == doctest::Approx(3 * k(1) + 2 * k(3)));
  CHECK(rho[1] == doctest::Approx(k(1) + 2 * k(2)));
  CHECK(rho[2] == doctest::Approx(k(3) + 3 * k(2)));
}

TEST_CASE("equal densities break toward the lower index") {
  const auto dm = pairwise_distances(line({0, 2}));
  const auto tree = build_leading_tree(dm, local_density(dm, 2.0, ones(2)));
  CHECK(tree.root == 0);
  CHECK(tree.ln[0] == kNoParent);
  CHECK(tree.ln[1] == 0);
  CHECK(tree.delta[1] == 2.0);
  CHECK(tree.delta[0] == 2.0);
}

TEST_CASE("leading tree of [0,1,2,10]") {
  const auto dm = pairwise_distances(line({0, 1, 2, 10}));
  const auto tree = build_leading_tree(dm, local_density(dm, 2.0, ones(4)));
  CHECK(tree.root == 1);
  CHECK(tree.ln == std::vector<std::size_t>{1, kNoParent, 1, 2});
  CHECK(tree.delta == std::vector<double>{1, 9, 1, 8});
  for (std::size_t i = 0; i < 4; ++i) CHECK(tree.gamma[i] == tree.rho[i] * tree.delta[i]);
  CHECK_NOTHROW(check_invariants(tree));
}

TEST_CASE("single point tree") {
  const auto dm = pairwise_distances(line({1}));
  const auto tree = build_leading_tree(dm, local_density(dm, 1.0, ones(1)));
  CHECK(tree.root == 0);
  CHECK(tree.delta[0] == 0.0);
}

TEST_CASE("is_superior") {
  const auto dm = pairwise_distances(line({0, 1, 2, 10}));
  const auto tree = build_leading_tree(dm, local_density(dm, 2.0, ones(4)));
  for (std::size_t j = 0; j < 4; ++j) {
    if (j != tree.root) CHECK_FALSE(is_superior(tree, tree.root, j));
    if (j != tree.root) CHECK(is_superior(tree, j, tree.root));
    CHECK_FALSE(is_superior(tree, j, j));
  }
  CHECK(is_superior(tree, 3, 2));
  CHECK_FALSE(is_superior(tree, 2, 3));
  CHECK_FALSE(is_superior(tree, 0, 2));
}

TEST_CASE("nearest_denser agrees with the tree") {
  const auto dm = pairwise_distances(line({0, 1, 2, 10, 11}));
  const auto rho = local_density(dm, 2.0, ones(5));
  const auto tree = build_leading_tree(dm, rho);
  for (std::size_t i = 0; i < 5; ++i) CHECK(nearest_denser(dm, rho, i) == tree.ln[i]);
}

TEST_CASE("check_invariants catches corruption") {
  const auto dm = pairwise_distances(line({0, 1, 2, 10}));
  auto tree = build_leading_tree(dm, local_density(dm, 2.0, ones(4)));
  auto bad = tree;
  bad.ln[1] = 0;
  CHECK_THROWS_AS(check_invariants(bad), InvariantError);
  bad = tree;
  bad.gamma[2] += 1;
  CHECK_THROWS_AS(check_invariants(bad), InvariantError);
}

TEST_CASE("brute-force equivalence on random data") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const bool grid = trial % 2 == 0;
    const std::size_t n = 2 + rng() % 49, d = 1 + rng() % 5;
    const auto data = oracle::random_points(rng, n, d, grid);
    const auto dm = pairwise_distances(data.features);
    const double d_c = cutoff_distance(dm, 2.0 + double(rng() % 20));
    const auto tree = build_leading_tree(dm, local_density(dm, d_c, data.pop));
    const auto ref = oracle::tree(data.features, data.pop, d_c);
    CHECK(tree.rho == ref.rho);
    CHECK(tree.delta == ref.delta);
    CHECK(tree.gamma == ref.gamma);
    CHECK(tree.root == ref.root);
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK(tree.ln[i] == (ref.ln[i] == oracle::kNone ? kNoParent : ref.ln[i]));
    }
    CHECK_NOTHROW(check_invariants(tree));
    double far = 0;
    for (std::size_t j = 0; j < data.size(); ++j) far = std::max(far, dm(tree.root, j));
    CHECK(tree.gamma[tree.root] == tree.rho[tree.root] * far);
  }
}

TEST_CASE("tree DOT export") {
  const auto dm = pairwise_distances(line({0, 1, 2}));
  const auto tree = build_leading_tree(dm, local_density(dm, 1.0, ones(3)));
  std::ostringstream out;
  write_dot(out, tree);
  const auto s = out.str();
  CHECK(s.rfind("digraph", 0) == 0);
  CHECK(s.find("0 -> 1") != std::string::npos);
  CHECK(s.find("2 -> 1") != std::string::npos);
  CHECK(s.find("1:\xcf\x81=") != std::string::npos);
}

}
