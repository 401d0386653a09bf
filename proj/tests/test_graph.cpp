#include "doctest.h"

#include "srdl/cube.hpp"
#include "srdl/errors.hpp"
#include "srdl/graph.hpp"
#include "srdl/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace srdl;

namespace {

HsiCube random_cube(int h, int w, int d, uint64_t seed) {
  HsiCube c(h, w, d);
  Rng rng(seed);
  for (auto& v : c.data()) v = rng.uniform01();
  return c;
}

// Independent dense reimplementation of the spatially constrained kNN kernel
// graph, used as the oracle for build_graph.
struct DenseOracle {
  Eigen::MatrixXd W;
  Eigen::MatrixXd P;
  double sigma = 0.0;
};

DenseOracle brute_force_graph(const HsiCube& cube, int k, double radius,
                              double fixed_sigma, double multiplier) {
  const int n = cube.pixels();
  const int w = cube.width();
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist(i, j) = (cube.spectrum(i) - cube.spectrum(j)).norm();

  std::vector<std::vector<int>> knn(n);
  double dist_sum = 0.0;
  size_t dist_count = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> cand;
    const int ir = i / w, ic = i % w;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const int jr = j / w, jc = j % w;
      const double d2 = (ir - jr) * (ir - jr) + (ic - jc) * (ic - jc);
      if (d2 <= radius * radius) cand.emplace_back(dist(i, j), j);
    }
    std::sort(cand.begin(), cand.end());
    const size_t keep = std::min<size_t>(k, cand.size());
    for (size_t t = 0; t < keep; ++t) {
      knn[i].push_back(cand[t].second);
      dist_sum += cand[t].first;
      ++dist_count;
    }
  }

  DenseOracle o;
  o.sigma = fixed_sigma > 0.0 ? fixed_sigma
                              : multiplier * dist_sum / static_cast<double>(dist_count);
  o.W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : knn[i]) {
      const double wij = std::exp(-dist(i, j) * dist(i, j) / (o.sigma * o.sigma));
      o.W(i, j) = std::max(o.W(i, j), wij);
      o.W(j, i) = o.W(i, j);
    }
  o.P = o.W.array().colwise() / o.W.rowwise().sum().array();
  return o;
}

// 2x2 cube whose k=1 graph splits into two mutual-nearest pairs
HsiCube split_pairs_cube() {
  HsiCube c(2, 2, 1);
  c.data() = {0.0, 0.01, 10.0, 10.01};
  return c;
}

} // namespace

TEST_SUITE("graph") {

TEST_CASE("spatial_candidates enumerates the punctured disk") {
  // interior pixel, radius 2: 4 axial at distance 1, 4 diagonal at sqrt(2),
  // 4 axial at distance 2
  const auto p = PixelIndex::from_rc(25, 25, 50);
  auto cands = spatial_candidates(50, 50, p, 2.0);
  CHECK(cands.size() == 12);
  for (const auto& q : cands) {
    const double d2 = (q.row - 25) * (q.row - 25) + (q.col - 25) * (q.col - 25);
    CHECK(d2 > 0);
    CHECK(d2 <= 4.0);
  }

  SUBCASE("corner pixels get the clipped quarter disk") {
    auto corner = spatial_candidates(50, 50, PixelIndex::from_rc(0, 0, 50), 2.0);
    // (0,1),(0,2),(1,0),(2,0),(1,1)
    CHECK(corner.size() == 5);
  }
  SUBCASE("radius below 1 leaves no candidates") {
    CHECK(spatial_candidates(50, 50, p, 0.5).empty());
  }
  SUBCASE("infinite radius yields every other pixel") {
    auto all = spatial_candidates(4, 5, PixelIndex::from_rc(1, 1, 5), kRadiusInf);
    CHECK(all.size() == 19);
    std::set<int> flats;
    for (const auto& q : all) flats.insert(q.flat);
    CHECK(flats.size() == 19);
    CHECK(flats.count(6) == 0); // self excluded
  }
  SUBCASE("radii nest") {
    auto small = spatial_candidates(50, 50, p, 2.0);
    auto large = spatial_candidates(50, 50, p, 3.0);
    std::set<int> large_set;
    for (const auto& q : large) large_set.insert(q.flat);
    for (const auto& q : small) CHECK(large_set.count(q.flat) == 1);
  }
  SUBCASE("out-of-bounds pixel is rejected") {
    CHECK_THROWS_AS(spatial_candidates(4, 4, PixelIndex::from_rc(4, 0, 4), 1.0),
                    input_error);
  }
}

TEST_CASE("kernel_weight matches the Gaussian formula") {
  Eigen::VectorXd x(2), y(2);
  x << 0.0, 0.0;

  y << 0.0, 0.0;
  CHECK(kernel_weight(x, y, 0.5) == 1.0);

  y << 0.7, 0.0; // distance sigma -> e^-1
  CHECK(kernel_weight(x, y, 0.7) == doctest::Approx(0.36787944117144233).epsilon(1e-14));

  y << 1.4, 0.0; // distance 2 sigma -> e^-4
  CHECK(kernel_weight(x, y, 0.7) == doctest::Approx(0.018315638888734179).epsilon(1e-14));

  CHECK_THROWS_AS(kernel_weight(x, y, 0.0), input_error);
  y << std::nan(""), 0.0;
  CHECK_THROWS_AS(kernel_weight(x, y, 1.0), input_error);
}

TEST_CASE("build_graph agrees with a dense brute-force oracle") {
  HsiCube cube = random_cube(6, 6, 3, 2024);

  GraphConfig cfg;
  cfg.k = 4;
  cfg.radius = 2.0;

  SUBCASE("fixed sigma") {
    cfg.sigma_mode = GraphConfig::SigmaMode::fixed;
    cfg.sigma = 0.7;
    SparseMarkov g = build_graph(cube, cfg);
    DenseOracle o = brute_force_graph(cube, cfg.k, cfg.radius, 0.7, 1.0);

    CHECK(g.sigma == 0.7);
    Eigen::MatrixXd W = Eigen::MatrixXd(g.W);
    Eigen::MatrixXd P = Eigen::MatrixXd(g.P);
    CHECK((W - o.W).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P - o.P).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("adaptive sigma is the mean retained-edge distance") {
    SparseMarkov g = build_graph(cube, cfg);
    DenseOracle o = brute_force_graph(cube, cfg.k, cfg.radius, 0.0, 1.0);
    CHECK(g.sigma == doctest::Approx(o.sigma).epsilon(1e-12));
    CHECK((Eigen::MatrixXd(g.W) - o.W).cwiseAbs().maxCoeff() < 1e-12);

    GraphConfig doubled = cfg;
    doubled.sigma_multiplier = 2.0;
    SparseMarkov g2 = build_graph(cube, doubled);
    CHECK(g2.sigma == doctest::Approx(2.0 * g.sigma).epsilon(1e-12));
  }

  SUBCASE("infinite radius matches an unconstrained oracle") {
    cfg.radius = kRadiusInf;
    cfg.k = 6;
    SparseMarkov g = build_graph(cube, cfg);
    DenseOracle o = brute_force_graph(cube, cfg.k, 1e9, 0.0, 1.0);
    CHECK((Eigen::MatrixXd(g.W) - o.W).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("markov structure invariants hold") {
  HsiCube cube = random_cube(8, 8, 4, 7);
  GraphConfig cfg;
  cfg.k = 5;
  cfg.radius = 2.0;
  SparseMarkov g = build_graph(cube, cfg);

  // rows of P sum to one
  Eigen::VectorXd sums = g.P * Eigen::VectorXd::Ones(g.n);
  CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-10);

  // W exactly symmetric, zero diagonal, entries in [0,1], row degree bounded
  Eigen::MatrixXd W = Eigen::MatrixXd(g.W);
  CHECK((W - W.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(W.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(W.minCoeff() >= 0.0);
  CHECK(W.maxCoeff() <= 1.0);
  // n*k directed edges symmetrized: at most 2nk stored entries. (No useful
  // per-row bound exists: the in-degree of a kNN digraph is unbounded.)
  CHECK(g.W.nonZeros() <= 2 * g.n * cfg.k);

  SUBCASE("no edge crosses the spatial radius (exhaustive)") {
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.n; ++j) {
        if (W(i, j) == 0.0) continue;
        const int dr = i / 8 - j / 8, dc = i % 8 - j % 8;
        CHECK(dr * dr + dc * dc <= cfg.radius * cfg.radius);
      }
    }
  }

  SUBCASE("sparsity pattern nests as k grows") {
    GraphConfig small = cfg;
    small.k = 2;
    Eigen::MatrixXd W2 = Eigen::MatrixXd(build_graph(cube, small).W);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        if (W2(i, j) != 0.0) CHECK(W(i, j) != 0.0);
  }

  SUBCASE("construction is deterministic") {
    SparseMarkov g2 = build_graph(cube, cfg);
    CHECK(g2.sigma == g.sigma);
    CHECK((Eigen::MatrixXd(g2.W) - W).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("identical spectra fall back to weight one") {
  // all retained distances zero: adaptive sigma has no scale, weights are 1
  HsiCube c(2, 2, 2);
  c.data().assign(8, 3.25);
  GraphConfig cfg;
  cfg.k = 3;
  cfg.radius = 2.0;
  SparseMarkov g = build_graph(c, cfg);
  Eigen::MatrixXd W = Eigen::MatrixXd(g.W);
  CHECK(W.maxCoeff() == 1.0);
  Eigen::VectorXd sums = g.P * Eigen::VectorXd::Ones(g.n);
  CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("degenerate spatial configurations raise numeric errors") {
  HsiCube cube = random_cube(4, 4, 2, 5);
  GraphConfig cfg;
  cfg.k = 2;

  SUBCASE("radius below one isolates every pixel") {
    cfg.radius = 0.5;
    CHECK_THROWS_AS(build_graph(cube, cfg), numeric_error);
  }
  SUBCASE("disconnected mutual pairs are refused unless allowed") {
    HsiCube pairs = split_pairs_cube();
    GraphConfig c1;
    c1.k = 1;
    c1.radius = 1.0;
    CHECK_THROWS_AS(build_graph(pairs, c1), numeric_error);

    c1.allow_disconnected = true;
    SparseMarkov g = build_graph(pairs, c1);
    CHECK_FALSE(is_connected(g));
    CHECK(g.W.nonZeros() == 4); // two undirected edges
  }
  SUBCASE("raising k reconnects the mutual pairs") {
    HsiCube pairs = split_pairs_cube();
    GraphConfig c2;
    c2.k = 2;
    c2.radius = 1.0;
    SparseMarkov g = build_graph(pairs, c2);
    CHECK(is_connected(g));
  }
}

TEST_CASE("config validation rejects bad parameters") {
  GraphConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), input_error);
  cfg.k = 1;
  cfg.radius = 0.0;
  CHECK_THROWS_AS(cfg.validate(), input_error);
  cfg.radius = 1.0;
  cfg.sigma_mode = GraphConfig::SigmaMode::fixed;
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), input_error);
  cfg.sigma = 1.0;
  cfg.sigma_multiplier = -1.0;
  CHECK_THROWS_AS(cfg.validate(), input_error);
}

TEST_CASE("markov_from_weights validates and normalizes") {
  Eigen::SparseMatrix<double> W(3, 3);
  std::vector<Eigen::Triplet<double>> t{{0, 1, 0.5}, {1, 0, 0.5}, {1, 2, 2.0}, {2, 1, 2.0}};
  W.setFromTriplets(t.begin(), t.end());
  SparseMarkov g = markov_from_weights(W);
  CHECK(g.n == 3);
  Eigen::VectorXd sums = g.P * Eigen::VectorXd::Ones(3);
  CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(g.deg[1] == doctest::Approx(2.5));

  SUBCASE("asymmetry is rejected") {
    Eigen::SparseMatrix<double> bad(2, 2);
    bad.insert(0, 1) = 1.0;
    CHECK_THROWS_AS(markov_from_weights(bad), input_error);
  }
  SUBCASE("zero-degree vertex is rejected") {
    Eigen::SparseMatrix<double> lonely(3, 3);
    lonely.insert(0, 1) = 1.0;
    lonely.insert(1, 0) = 1.0;
    CHECK_THROWS_AS(markov_from_weights(lonely), numeric_error);
  }
}

} // TEST_SUITE
