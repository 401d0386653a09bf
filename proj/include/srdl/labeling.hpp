#pragma once

#include "srdl/cube.hpp"
#include "srdl/diffusion.hpp"
#include "srdl/graph.hpp"
#include "srdl/modes.hpp"
#include "srdl/spectral.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace srdl {

enum class Provenance : uint8_t {
  unlabeled = 0,
  mode,
  stage1_spectral,
  stage2_consensus,
  stage2_spectral,
};

const char* provenance_name(Provenance p);

struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<int> labels; // 0 = unlabeled, else 1..K
  std::vector<Provenance> provenance;
  // echo of the consensus parameters the map was built with
  double consensus_radius = 0.0;
  double consensus_threshold = 0.5;

  int pixels() const { return height * width; }
};

struct LabelingConfig {
  double consensus_radius = 0.0;    // spatial disk for consensus queries
  double consensus_threshold = 0.5; // share to beat strictly; > 1 disables consensus
  void validate() const;
};

// The label whose share among labeled pixels inside the Euclidean disk of
// radius r_c around pix (pix excluded) strictly exceeds `threshold`; nullopt
// when the disk holds no labeled pixel or no label clears the bar.
std::optional<int> consensus_label(const LabelMap& lm, const PixelIndex& pix,
                                   double r_c, double threshold);

// Stage 1: modes take labels 1..K; every other pixel, in decreasing density,
// copies the label of its nearest already-labeled denser pixel in the
// embedded coordinates — unless a differing spatial consensus label exists,
// which vetoes the assignment and leaves the pixel unlabeled.
LabelMap stage1(const ModeModel& mm, const DiffusionCoords& c, int height,
                int width, const LabelingConfig& cfg);

// Stage 2: pixels stage 1 left unlabeled, in decreasing density, take the
// spatial consensus label when one exists and otherwise fall back to the
// nearest denser pixel's label. Every pixel is labeled afterwards.
LabelMap stage2(const LabelMap& partial, const ModeModel& mm,
                const DiffusionCoords& c);

struct PipelineConfig {
  GraphConfig graph;  // k = 100, spatial radius, kernel scale
  int t = 30;         // diffusion time
  int m_cap = 50;     // most eigenpairs ever retained
  double tau = 1e-2;  // eigenvalue-decay cutoff for select_m
  KdeConfig kde;
  int clusters = 0;   // 0 = use estimate_k
  int k_max = 20;     // search bound for estimate_k
  // 0 = inherit the graph radius; consensus is disabled when the resolved
  // radius is not finite (spectral-only baseline at radius = inf).
  double consensus_radius = 0.0;
  double consensus_threshold = 0.5;

  void validate() const;
  LabelingConfig resolve_consensus() const;
};

struct ClusterResult {
  LabelMap labels;
  ModeModel modes;
  DiffusionEmbedding embedding;
  DiffusionCoords coords;
  double graph_sigma = 0.0;
};

// Full pipeline: graph -> eigenpairs -> truncation -> embedding -> density
// modes -> two-stage labeling. Deterministic for a fixed cube and config.
// graph_out, when given, receives the intermediate Markov structure.
ClusterResult cluster(const HsiCube& cube, const PipelineConfig& cfg,
                      SparseMarkov* graph_out = nullptr);

} // namespace srdl
