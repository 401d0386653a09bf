#include "srdl/labeling.hpp"

#include "srdl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace srdl {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::unlabeled: return "unlabeled";
    case Provenance::mode: return "mode";
    case Provenance::stage1_spectral: return "stage1-spectral";
    case Provenance::stage2_consensus: return "stage2-consensus";
    case Provenance::stage2_spectral: return "stage2-spectral";
  }
  return "unknown";
}

void LabelingConfig::validate() const {
  if (std::isnan(consensus_radius) || consensus_radius <= 0.0) {
    throw input_error("labeling: consensus radius must be positive, got " +
                      std::to_string(consensus_radius));
  }
  if (std::isnan(consensus_threshold) || consensus_threshold < 0.5) {
    throw input_error(
        "labeling: consensus threshold must be >= 0.5 (or > 1 to disable), got " +
        std::to_string(consensus_threshold));
  }
}

namespace {

// Consensus is meaningful only for a finite disk and an attainable share.
bool consensus_active(const LabelingConfig& cfg) {
  return cfg.consensus_threshold <= 1.0 && std::isfinite(cfg.consensus_radius);
}

} // namespace

std::optional<int> consensus_label(const LabelMap& lm, const PixelIndex& pix,
                                   double r_c, double threshold) {
  int total = 0;
  std::unordered_map<int, int> counts;
  for (const PixelIndex& q :
       spatial_candidates(lm.height, lm.width, pix, r_c)) {
    const int lab = lm.labels[static_cast<size_t>(q.flat)];
    if (lab == 0) continue;
    ++total;
    ++counts[lab];
  }
  if (total == 0) return std::nullopt;
  int best_label = 0, best_count = -1;
  for (const auto& [lab, cnt] : counts) {
    if (cnt > best_count || (cnt == best_count && lab < best_label)) {
      best_label = lab;
      best_count = cnt;
    }
  }
  if (static_cast<double>(best_count) > threshold * total) return best_label;
  return std::nullopt;
}

LabelMap stage1(const ModeModel& mm, const DiffusionCoords& c, int height,
                int width, const LabelingConfig& cfg) {
  cfg.validate();
  const int n = height * width;
  if (n != c.n || n != static_cast<int>(mm.p.size())) {
    std::ostringstream err;
    err << "stage1: " << height << "x" << width << " grid vs " << c.n
        << " embedded points and " << mm.p.size() << " densities";
    throw input_error(err.str());
  }

  LabelMap lm;
  lm.height = height;
  lm.width = width;
  lm.labels.assign(static_cast<size_t>(n), 0);
  lm.provenance.assign(static_cast<size_t>(n), Provenance::unlabeled);
  lm.consensus_radius = cfg.consensus_radius;
  lm.consensus_threshold = cfg.consensus_threshold;

  for (size_t i = 0; i < mm.modes.size(); ++i) {
    const int x = mm.modes[i];
    if (x < 0 || x >= n) throw input_error("stage1: mode index out of range");
    if (lm.labels[static_cast<size_t>(x)] != 0) {
      throw input_error("stage1: duplicate mode index " + std::to_string(x));
    }
    lm.labels[static_cast<size_t>(x)] = static_cast<int>(i) + 1;
    lm.provenance[static_cast<size_t>(x)] = Provenance::mode;
  }

  const bool use_consensus = consensus_active(cfg);
  const std::vector<int> order = density_order(mm.p);

  // Coordinates permuted into density order: the labeled-denser scan for a
  // pixel at position s only ever touches rows [0, s).
  Eigen::MatrixXd pc(n, c.m);
  for (int s = 0; s < n; ++s) pc.row(s) = c.coords.row(order[s]);
  Eigen::VectorXd d2(n);

  for (int s = 0; s < n; ++s) {
    const int x = order[s];
    if (lm.labels[static_cast<size_t>(x)] != 0) continue; // mode

    int candidate = 0;
    const int par = mm.parent[static_cast<size_t>(x)];
    if (par >= 0 && lm.labels[static_cast<size_t>(par)] != 0) {
      // The nearest denser pixel is labeled, so it is also the nearest
      // labeled denser pixel.
      candidate = lm.labels[static_cast<size_t>(par)];
    } else {
      d2.head(s) = (pc.topRows(s).rowwise() - pc.row(s)).rowwise().squaredNorm();
      double best = std::numeric_limits<double>::infinity();
      int best_flat = -1;
      for (int q = 0; q < s; ++q) {
        const int y = order[q];
        if (lm.labels[static_cast<size_t>(y)] == 0) continue;
        if (d2[q] < best || (d2[q] == best && y < best_flat)) {
          best = d2[q];
          best_flat = y;
        }
      }
      if (best_flat < 0) {
        // Unreachable: the density maximizer is always a mode, hence labeled.
        throw numeric_error("stage1: no labeled denser pixel for pixel " +
                            std::to_string(x));
      }
      candidate = lm.labels[static_cast<size_t>(best_flat)];
    }

    if (use_consensus) {
      const auto consensus =
          consensus_label(lm, PixelIndex::from_flat(x, width),
                          cfg.consensus_radius, cfg.consensus_threshold);
      if (consensus && *consensus != candidate) continue; // veto
    }
    lm.labels[static_cast<size_t>(x)] = candidate;
    lm.provenance[static_cast<size_t>(x)] = Provenance::stage1_spectral;
  }
  return lm;
}

LabelMap stage2(const LabelMap& partial, const ModeModel& mm,
                const DiffusionCoords& c) {
  const int n = partial.pixels();
  if (n != c.n || n != static_cast<int>(mm.p.size())) {
    throw input_error("stage2: size mismatch between label map, embedding and densities");
  }
  LabelMap lm = partial;
  const LabelingConfig cfg{lm.consensus_radius, lm.consensus_threshold};
  const bool use_consensus = consensus_active(cfg);
  const std::vector<int> order = density_order(mm.p);

  for (int s = 0; s < n; ++s) {
    const int x = order[s];
    if (lm.labels[static_cast<size_t>(x)] != 0) continue;

    if (use_consensus) {
      const auto consensus =
          consensus_label(lm, PixelIndex::from_flat(x, lm.width),
                          cfg.consensus_radius, cfg.consensus_threshold);
      if (consensus) {
        lm.labels[static_cast<size_t>(x)] = *consensus;
        lm.provenance[static_cast<size_t>(x)] = Provenance::stage2_consensus;
        continue;
      }
    }
    // Every denser pixel is labeled by now (stage 2 processes in decreasing
    // density), so the nearest labeled denser pixel is exactly the parent.
    const int par = mm.parent[static_cast<size_t>(x)];
    if (par < 0 || lm.labels[static_cast<size_t>(par)] == 0) {
      throw numeric_error("stage2: unlabeled parent for pixel " + std::to_string(x));
    }
    lm.labels[static_cast<size_t>(x)] = lm.labels[static_cast<size_t>(par)];
    lm.provenance[static_cast<size_t>(x)] = Provenance::stage2_spectral;
  }
  return lm;
}

void PipelineConfig::validate() const {
  graph.validate();
  kde.validate();
  if (t < 1) throw input_error("pipeline: t must be >= 1, got " + std::to_string(t));
  if (m_cap < 2) {
    throw input_error("pipeline: m_cap must be >= 2, got " + std::to_string(m_cap));
  }
  if (!(tau > 0.0) || !(tau < 1.0)) {
    throw input_error("pipeline: tau must lie in (0,1), got " + std::to_string(tau));
  }
  if (clusters < 0) {
    throw input_error("pipeline: clusters must be >= 0 (0 = auto), got " +
                      std::to_string(clusters));
  }
  if (k_max < 2) {
    throw input_error("pipeline: k_max must be >= 2, got " + std::to_string(k_max));
  }
  if (std::isnan(consensus_radius) || consensus_radius < 0.0) {
    throw input_error("pipeline: consensus radius must be >= 0 (0 = graph radius)");
  }
  if (std::isnan(consensus_threshold) || consensus_threshold < 0.5) {
    throw input_error("pipeline: consensus threshold must be >= 0.5 (or > 1 to disable)");
  }
}

LabelingConfig PipelineConfig::resolve_consensus() const {
  LabelingConfig lc;
  lc.consensus_radius = consensus_radius > 0.0 ? consensus_radius : graph.radius;
  lc.consensus_threshold = consensus_threshold;
  return lc;
}

ClusterResult cluster(const HsiCube& cube, const PipelineConfig& cfg,
                      SparseMarkov* graph_out) {
  cfg.validate();
  cube.validate();
  const int n = cube.pixels();
  if (cfg.clusters > n) {
    throw input_error("pipeline: clusters=" + std::to_string(cfg.clusters) +
                      " exceeds pixel count " + std::to_string(n));
  }

  ClusterResult res;
  const SparseMarkov g = build_graph(cube, cfg.graph);
  res.graph_sigma = g.sigma;

  // One spare pair beyond the cap so select_m can see the decay past it.
  const int want = std::min(cfg.m_cap + 1, n);
  const EigenPairs pairs = eigendecompose(g, want);
  const int m = select_m(pairs.lambdas, cfg.t, cfg.m_cap, cfg.tau);
  res.embedding = make_embedding(pairs, m, cfg.t);
  res.coords = embed(res.embedding);

  res.modes = detect_modes(cube, res.coords, cfg.kde, cfg.clusters, cfg.k_max);

  const LabelingConfig lc = cfg.resolve_consensus();
  const LabelMap partial =
      stage1(res.modes, res.coords, cube.height(), cube.width(), lc);
  res.labels = stage2(partial, res.modes, res.coords);
  if (graph_out) *graph_out = g;
  return res;
}

} // namespace srdl
