#include "doctest.h"

#include "srdl/errors.hpp"
#include "srdl/eval.hpp"
#include "srdl/labeling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace srdl;

namespace {

DiffusionCoords line_coords(const std::vector<double>& xs) {
  DiffusionCoords c;
  c.n = static_cast<int>(xs.size());
  c.m = 1;
  c.coords.resize(c.n, 1);
  for (int i = 0; i < c.n; ++i) c.coords(i, 0) = xs[i];
  return c;
}

LabelMap empty_map(int h, int w) {
  LabelMap lm;
  lm.height = h;
  lm.width = w;
  lm.labels.assign(static_cast<size_t>(h) * w, 0);
  lm.provenance.assign(static_cast<size_t>(h) * w, Provenance::unlabeled);
  return lm;
}

// Two modes in opposite corners of a 4x4 grid. Pixel 5 = (1,1) is the least
// dense, sits spectrally next to mode B, but is spatially surrounded by A.
struct VetoFixture {
  ModeModel mm;
  DiffusionCoords coords;

  VetoFixture() {
    const int n = 16;
    mm.p.resize(n);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
      mm.p[i] = 0.9 - 0.01 * i; // descending with flat index
      xs[i] = 0.001 * i;        // everyone clusters spectrally near mode A
    }
    mm.p[0] = 1.0;   // mode A, density maximizer, coordinate 0
    mm.p[15] = 0.99; // mode B
    mm.p[5] = 0.01;  // the vetoed pixel goes last
    xs[0] = 0.0;
    xs[15] = 10.0;
    xs[5] = 9.9; // spectrally a B pixel
    coords = line_coords(xs);

    Eigen::VectorXd rho;
    rho_and_parent(mm.p, coords, rho, mm.parent);
    mm.rho_t = rho;
    mm.d_t = mm.p.array() * mm.rho_t.array();
    mm.modes = {0, 15};
    mm.k_hat = 2;
  }
};

} // namespace

TEST_SUITE("labeling") {

TEST_CASE("consensus_label counts labeled pixels in the disk") {
  LabelMap lm = empty_map(3, 3);
  // around center (1,1): 4 x label 1, 2 x label 2, 2 unlabeled
  lm.labels = {1, 1, 0,
               1, 2, 2, // center (flat 4) labeled 2: must be ignored
               1, 2, 0};
  lm.labels[4] = 2;
  const auto pix = PixelIndex::from_rc(1, 1, 3);

  auto got = consensus_label(lm, pix, 1.5, 0.5);
  REQUIRE(got.has_value());
  CHECK(*got == 1); // share 4/6 beats 1/2

  CHECK_FALSE(consensus_label(lm, pix, 1.5, 0.75).has_value()); // 4/6 < 3/4

  SUBCASE("the queried pixel itself never votes") {
    // center has label 2; without exclusion label 2 would reach 3/7
    auto strict = consensus_label(lm, pix, 1.5, 0.4);
    REQUIRE(strict.has_value());
    CHECK(*strict == 1);
  }
  SUBCASE("empty disk yields no consensus") {
    LabelMap bare = empty_map(3, 3);
    CHECK_FALSE(consensus_label(bare, pix, 1.5, 0.5).has_value());
  }
  SUBCASE("exact tie prefers the lower label id") {
    LabelMap tie = empty_map(3, 3);
    tie.labels = {2, 1, 0, 1, 0, 2, 0, 0, 0};
    auto t = consensus_label(tie, pix, 1.5, 0.45);
    REQUIRE(t.has_value());
    CHECK(*t == 1); // 2 vs 2 votes, lower id wins
  }
  SUBCASE("share must beat the threshold strictly") {
    LabelMap half = empty_map(3, 3);
    half.labels = {1, 1, 0, 2, 0, 2, 0, 0, 0};
    CHECK_FALSE(consensus_label(half, pix, 1.5, 0.5).has_value()); // exactly 1/2
  }
}

TEST_CASE("stage1 fills from modes and vetoes spectral outliers") {
  VetoFixture fx;
  LabelingConfig cfg;
  cfg.consensus_radius = 1.5;
  cfg.consensus_threshold = 0.5;

  LabelMap s1 = stage1(fx.mm, fx.coords, 4, 4, cfg);

  CHECK(s1.labels[0] == 1);
  CHECK(s1.labels[15] == 2);
  CHECK(s1.provenance[0] == Provenance::mode);
  CHECK(s1.provenance[15] == Provenance::mode);

  // everyone except pixel 5 chains to mode A spectrally
  for (int i = 0; i < 16; ++i) {
    if (i == 5 || i == 15) continue;
    CHECK(s1.labels[i] == 1);
    if (i != 0) CHECK(s1.provenance[i] == Provenance::stage1_spectral);
  }

  // pixel 5: spectral candidate is B, spatial consensus says A -> vetoed
  CHECK(s1.labels[5] == 0);
  CHECK(s1.provenance[5] == Provenance::unlabeled);

  SUBCASE("stage2 resolves the veto by consensus") {
    LabelMap s2 = stage2(s1, fx.mm, fx.coords);
    CHECK(s2.labels[5] == 1);
    CHECK(s2.provenance[5] == Provenance::stage2_consensus);
    for (int i = 0; i < 16; ++i) CHECK(s2.labels[i] != 0);
    // stage2 only touches the vetoed pixel
    for (int i = 0; i < 16; ++i)
      if (i != 5) CHECK(s2.labels[i] == s1.labels[i]);
  }

  SUBCASE("threshold above one disables the veto entirely") {
    cfg.consensus_threshold = 1.5;
    LabelMap open = stage1(fx.mm, fx.coords, 4, 4, cfg);
    CHECK(open.labels[5] == 2); // pure nearest-denser propagation
    CHECK(open.provenance[5] == Provenance::stage1_spectral);
  }

  SUBCASE("infinite consensus radius also disables the veto") {
    cfg.consensus_radius = kRadiusInf;
    LabelMap open = stage1(fx.mm, fx.coords, 4, 4, cfg);
    CHECK(open.labels[5] == 2);
  }
}

TEST_CASE("stage2 falls back to the spectral rule without labeled neighbors") {
  // only (0,0) labeled; the first unlabeled pixel processed is (2,2), whose
  // radius-1 neighbors are all unlabeled at that moment
  ModeModel mm;
  mm.p.resize(9);
  mm.p << 1.0, 0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.9;
  DiffusionCoords coords =
      line_coords({0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.05});
  Eigen::VectorXd rho;
  rho_and_parent(mm.p, coords, rho, mm.parent);
  mm.rho_t = rho;
  mm.d_t = mm.p.array() * mm.rho_t.array();
  mm.modes = {0};
  mm.k_hat = 1;

  LabelMap partial = empty_map(3, 3);
  partial.labels[0] = 1;
  partial.provenance[0] = Provenance::mode;
  partial.consensus_radius = 1.0;
  partial.consensus_threshold = 0.5;

  LabelMap full = stage2(partial, mm, coords);

  for (int i = 0; i < 9; ++i) CHECK(full.labels[i] == 1);
  CHECK(full.provenance[8] == Provenance::stage2_spectral); // (2,2), parent rule
  CHECK(full.provenance[1] == Provenance::stage2_consensus); // (0,1) sees (0,0)
  CHECK(full.provenance[0] == Provenance::mode);
}

TEST_CASE("labeling config validation") {
  LabelingConfig cfg;
  cfg.consensus_radius = 0.0;
  CHECK_THROWS_AS(cfg.validate(), input_error);
  cfg.consensus_radius = 2.0;
  cfg.consensus_threshold = 0.3;
  CHECK_THROWS_AS(cfg.validate(), input_error);
  cfg.consensus_threshold = 0.5;
  CHECK_NOTHROW(cfg.validate());

  PipelineConfig pc;
  pc.graph.radius = 4.0;
  SUBCASE("pipeline consensus radius inherits the graph radius") {
    CHECK(pc.resolve_consensus().consensus_radius == 4.0);
    pc.consensus_radius = 2.5;
    CHECK(pc.resolve_consensus().consensus_radius == 2.5);
  }
  SUBCASE("pipeline parameter bounds") {
    pc.t = 0;
    CHECK_THROWS_AS(pc.validate(), input_error);
    pc.t = 30;
    pc.tau = 1.0;
    CHECK_THROWS_AS(pc.validate(), input_error);
    pc.tau = 1e-2;
    pc.clusters = -1;
    CHECK_THROWS_AS(pc.validate(), input_error);
    pc.clusters = 0;
    pc.k_max = 1;
    CHECK_THROWS_AS(pc.validate(), input_error);
  }
}

TEST_CASE("cluster pipeline separates synthetic stripes end to end") {
  HsiCube cube = synth_stripes(21, 21, 6, 3, 0.05, 5);
  PipelineConfig cfg;
  cfg.graph.k = 40;
  cfg.graph.radius = 3.0;
  cfg.clusters = 3;

  ClusterResult res = cluster(cube, cfg);

  REQUIRE(res.labels.labels.size() == 441);
  CHECK(res.modes.modes.size() == 3);
  CHECK(res.embedding.m >= 2);
  CHECK(res.graph_sigma > 0.0);
  for (int l : res.labels.labels) {
    CHECK(l >= 1);
    CHECK(l <= 3);
  }

  EvalReport ev = evaluate(res.labels, cube.gt());
  CHECK(ev.oa >= 0.9);

  SUBCASE("gt label permutation leaves the score unchanged") {
    std::vector<int> permuted = cube.gt();
    for (int& g : permuted) g = g % 3 + 1; // 1->2, 2->3, 3->1
    EvalReport ev2 = evaluate(res.labels, permuted);
    CHECK(ev2.oa == doctest::Approx(ev.oa));
  }
  SUBCASE("runs are deterministic") {
    ClusterResult again = cluster(cube, cfg);
    CHECK(again.labels.labels == res.labels.labels);
    CHECK((again.coords.coords - res.coords.coords).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("graph_out returns the markov structure") {
    SparseMarkov g;
    cluster(cube, cfg, &g);
    CHECK(g.n == 441);
    CHECK(g.sigma == res.graph_sigma);
  }
  SUBCASE("provenance names are stable") {
    CHECK(std::string(provenance_name(Provenance::mode)) == "mode");
    CHECK(std::string(provenance_name(Provenance::stage1_spectral)) == "stage1-spectral");
    CHECK(std::string(provenance_name(Provenance::stage2_consensus)) == "stage2-consensus");
    CHECK(std::string(provenance_name(Provenance::stage2_spectral)) == "stage2-spectral");
    CHECK(std::string(provenance_name(Provenance::unlabeled)) == "unlabeled");
  }
  SUBCASE("requesting more clusters than pixels is rejected") {
    PipelineConfig bad = cfg;
    bad.clusters = 442;
    CHECK_THROWS_AS(cluster(cube, bad), input_error);
  }
}

} // TEST_SUITE
