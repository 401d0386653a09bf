#include "doctest.h"

#include "srdl/diffusion.hpp"
#include "srdl/errors.hpp"
#include "srdl/graph.hpp"
#include "srdl/modes.hpp"
#include "srdl/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace srdl;

namespace {

// 1-D coordinates wrapped as an embedding
DiffusionCoords line_coords(const std::vector<double>& xs) {
  DiffusionCoords c;
  c.n = static_cast<int>(xs.size());
  c.m = 1;
  c.coords.resize(c.n, 1);
  for (int i = 0; i < c.n; ++i) c.coords(i, 0) = xs[i];
  return c;
}

// two tight value clusters, 10x10 single-band cube
HsiCube two_blob_cube() {
  HsiCube c(10, 10, 1);
  for (int i = 0; i < 50; ++i) c.data()[i] = 0.02 * i;          // 0.00 .. 0.98
  for (int i = 0; i < 50; ++i) c.data()[50 + i] = 10.0 + 0.02 * i;
  return c;
}

} // namespace

TEST_SUITE("modes") {

TEST_CASE("kde ranks blob cores above blob fringes") {
  HsiCube cube = two_blob_cube();
  KdeConfig cfg; // knn = 20, adaptive bandwidth
  double bw = 0.0;
  Eigen::VectorXd p = kde(cube, cfg, &bw);

  REQUIRE(p.size() == 100);
  CHECK(bw > 0.0);
  CHECK(p.maxCoeff() == 1.0);
  CHECK(p.minCoeff() > 0.0);

  // value-space interior of each blob beats that blob's extremes
  CHECK(p[25] > p[0]);
  CHECK(p[25] > p[49]);
  CHECK(p[75] > p[50]);
  CHECK(p[75] > p[99]);

  SUBCASE("densities are strictly ordered after tie-breaking") {
    std::set<double> uniq(p.data(), p.data() + p.size());
    CHECK(uniq.size() == 100);
  }
  SUBCASE("exactly one density maximizer") {
    CHECK(std::count(p.data(), p.data() + p.size(), 1.0) == 1);
  }
}

TEST_CASE("kde adaptive bandwidth is the mean knn-th neighbor distance") {
  HsiCube cube = two_blob_cube();
  KdeConfig cfg;
  cfg.knn = 5;
  double bw = 0.0;
  Eigen::VectorXd p = kde(cube, cfg, &bw);

  // independent recomputation
  const int n = cube.pixels();
  double sum = 0.0;
  Eigen::VectorXd oracle(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> d;
    for (int j = 0; j < n; ++j)
      if (j != i) d.push_back(std::abs(cube.data()[i] - cube.data()[j]));
    std::sort(d.begin(), d.end());
    sum += d[4];
  }
  const double want_bw = sum / n;
  CHECK(bw == doctest::Approx(want_bw).epsilon(1e-12));

  for (int i = 0; i < n; ++i) {
    std::vector<double> d;
    for (int j = 0; j < n; ++j)
      if (j != i) d.push_back(std::abs(cube.data()[i] - cube.data()[j]));
    std::sort(d.begin(), d.end());
    double acc = 0.0;
    for (int t = 0; t < 5; ++t) acc += std::exp(-d[t] * d[t] / (want_bw * want_bw));
    oracle[i] = acc;
  }
  oracle /= oracle.maxCoeff();
  CHECK((p - oracle).cwiseAbs().maxCoeff() < 1e-9); // tie perturbation only

  SUBCASE("fixed bandwidth overrides the adaptive rule") {
    cfg.bandwidth = 3.0;
    double bw2 = 0.0;
    kde(cube, cfg, &bw2);
    CHECK(bw2 == 3.0);
  }
  SUBCASE("config validation") {
    KdeConfig bad;
    bad.knn = 0;
    CHECK_THROWS_AS(bad.validate(), input_error);
    bad.knn = 1;
    bad.bandwidth = -2.0;
    CHECK_THROWS_AS(bad.validate(), input_error);
  }
}

TEST_CASE("kde refuses all-identical spectra and points at jitter") {
  HsiCube flat(3, 3, 2);
  flat.data().assign(18, 1.0);
  try {
    kde(flat, KdeConfig{});
    CHECK_MESSAGE(false, "expected numeric_error");
  } catch (const numeric_error& e) {
    CHECK(std::string(e.what()).find("jitter") != std::string::npos);
  }
}

TEST_CASE("density_order sorts descending with higher-flat winning ties") {
  Eigen::VectorXd p(5);
  p << 0.3, 0.9, 0.3, 1.0, 0.1;
  auto ord = density_order(p);
  CHECK(ord == std::vector<int>{3, 1, 2, 0, 4}); // tie 0.3/0.3 -> flat 2 first
}

TEST_CASE("rho_and_parent on two points") {
  Eigen::VectorXd p(2);
  p << 1.0, 0.4;
  DiffusionCoords c = line_coords({0.0, 3.0});
  Eigen::VectorXd rho;
  std::vector<int> parent;
  rho_and_parent(p, c, rho, parent);

  CHECK(parent[1] == 0);
  CHECK(rho[1] == doctest::Approx(3.0));
  CHECK(parent[0] == -1);
  CHECK(rho[0] == doctest::Approx(3.0)); // maximizer takes the max of the others
}

TEST_CASE("rho_and_parent walks up a monotone chain") {
  // densities rise with the coordinate: each point's nearest denser point is
  // its right-hand neighbor
  Eigen::VectorXd p(5);
  p << 0.2, 0.4, 0.6, 0.8, 1.0;
  DiffusionCoords c = line_coords({0.0, 1.0, 2.0, 3.0, 4.0});
  Eigen::VectorXd rho;
  std::vector<int> parent;
  rho_and_parent(p, c, rho, parent);

  for (int i = 0; i < 4; ++i) {
    CHECK(parent[i] == i + 1);
    CHECK(rho[i] == doctest::Approx(1.0));
  }
  CHECK(parent[4] == -1);
  CHECK(rho[4] == doctest::Approx(1.0));
}

TEST_CASE("secondary cluster peak carries the inter-cluster gap") {
  // cluster 1 around 0, cluster 2 around 100; the densest point of cluster 2
  // must reach across the gap, everyone else stays local
  Eigen::VectorXd p(6);
  p << 1.0, 0.9, 0.8, 0.7, 0.6, 0.5;
  DiffusionCoords c = line_coords({0.0, 0.5, 1.0, 100.0, 100.5, 101.0});
  Eigen::VectorXd rho;
  std::vector<int> parent;
  rho_and_parent(p, c, rho, parent);

  CHECK(rho[3] >= 99.0);      // cluster-2 peak
  CHECK(parent[3] == 2);      // nearest denser lives in cluster 1
  CHECK(rho[4] == doctest::Approx(0.5));
  CHECK(rho[5] == doctest::Approx(0.5));
  CHECK(rho[1] == doctest::Approx(0.5));

  SUBCASE("parent pointers form a forest rooted at the maximizer") {
    for (int i = 0; i < 6; ++i) {
      int cur = i, hops = 0;
      while (parent[cur] != -1) {
        cur = parent[cur];
        REQUIRE(++hops <= 6); // no cycles
      }
      CHECK(cur == 0);
    }
  }
}

TEST_CASE("select_modes picks the top scores deterministically") {
  Eigen::VectorXd d(6);
  d << 0.1, 0.9, 0.3, 0.9, 0.05, 0.6;

  CHECK(select_modes(d, 1) == std::vector<int>{1}); // tie 1 vs 3 -> lower flat
  CHECK(select_modes(d, 3) == std::vector<int>{1, 3, 5});

  SUBCASE("mode sets nest as K grows") {
    for (int K = 1; K < 6; ++K) {
      auto small = select_modes(d, K);
      auto large = select_modes(d, K + 1);
      for (int m : small) CHECK(std::find(large.begin(), large.end(), m) != large.end());
    }
  }
  SUBCASE("K = N returns everything sorted by score") {
    auto all = select_modes(d, 6);
    CHECK(all == std::vector<int>{1, 3, 5, 2, 0, 4});
  }
  SUBCASE("K out of range") {
    CHECK_THROWS_AS(select_modes(d, 0), input_error);
    CHECK_THROWS_AS(select_modes(d, 7), input_error);
  }
}

TEST_CASE("estimate_k finds the largest relative gap") {
  Eigen::VectorXd s(5);
  s << 1.0, 0.9, 0.8, 0.01, 0.009;
  CHECK(estimate_k(s, 5) == 3); // 0.8/0.01 dominates

  SUBCASE("scale invariance") {
    CHECK(estimate_k(7.31 * s, 5) == 3);
  }
  SUBCASE("input order does not matter") {
    Eigen::VectorXd shuffled(5);
    shuffled << 0.01, 1.0, 0.009, 0.8, 0.9;
    CHECK(estimate_k(shuffled, 5) == 3);
  }
  SUBCASE("k_max restricts the searched positions") {
    Eigen::VectorXd tail(8);
    tail << 1.0, 0.99, 0.5, 0.49, 0.48, 0.47, 0.46, 0.001;
    CHECK(estimate_k(tail, 20) == 7); // gap 0.46/0.001
    CHECK(estimate_k(tail, 4) == 2);  // only j in {1,2,3} searched
  }
  SUBCASE("all-equal scores are degenerate") {
    Eigen::VectorXd flat = Eigen::VectorXd::Constant(6, 0.4);
    bool degenerate = false;
    CHECK(estimate_k(flat, 6, &degenerate) == 1);
    CHECK(degenerate);
  }
  SUBCASE("bad k_max") {
    CHECK_THROWS_AS(estimate_k(s, 1), input_error);
  }
}

TEST_CASE("detect_modes finds one mode per stripe on a synthetic cube") {
  HsiCube cube = synth_stripes(21, 21, 6, 3, 0.05, 5);
  GraphConfig gcfg;
  gcfg.k = 40;
  gcfg.radius = 3.0;
  SparseMarkov g = build_graph(cube, gcfg);
  EigenPairs pairs = eigendecompose(g, std::min(51, g.n));
  const int m = select_m(pairs.lambdas, 30);
  DiffusionCoords coords = embed(make_embedding(pairs, m, 30));

  ModeModel mm = detect_modes(cube, coords, KdeConfig{}, 3, 20);
  REQUIRE(mm.modes.size() == 3);

  std::set<int> stripes;
  for (int mode : mm.modes) stripes.insert(mode / 21 / 7); // row / stripe height
  CHECK(stripes.size() == 3);

  // separation property: mode gaps clear the median gap
  Eigen::VectorXd sorted_rho = mm.rho_t;
  std::sort(sorted_rho.data(), sorted_rho.data() + sorted_rho.size());
  const double median = sorted_rho[sorted_rho.size() / 2];
  for (int mode : mm.modes) CHECK(mm.rho_t[mode] > median);

  SUBCASE("scores multiply density and gap") {
    for (int i = 0; i < mm.p.size(); ++i)
      CHECK(mm.d_t[i] == doctest::Approx(mm.p[i] * mm.rho_t[i]).epsilon(1e-12));
  }
  SUBCASE("K = 0 falls back to the estimated count") {
    ModeModel automm = detect_modes(cube, coords, KdeConfig{}, 0, 20);
    CHECK(automm.k_hat >= 2);
    CHECK(static_cast<int>(automm.modes.size()) == automm.k_hat);
  }
}

} // TEST_SUITE
