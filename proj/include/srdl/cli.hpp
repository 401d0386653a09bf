#pragma once

#include "srdl/labeling.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srdl {

// Everything a batch run needs; flag names on the CLI mirror these fields.
struct RunConfig {
  std::string input;
  std::string format = "native"; // native | envi | csv
  std::string gt_path;           // label grid CSV; overrides any bundled gt
  double radius = kRadiusInf;    // spatial graph radius; inf = unconstrained
  int k = 100;
  int t = 30;
  int clusters = 0; // 0 = auto via estimate_k
  int k_max = 20;
  double sigma = 0.0; // fixed kernel scale; 0 = adaptive
  double sigma_multiplier = 1.0;
  int kde_knn = 20;
  double kde_bandwidth = 0.0;
  double consensus_radius = 0.0; // 0 = graph radius
  double consensus_threshold = 0.5;
  double jitter_variance = 0.0; // 0 = no jitter
  uint64_t seed = 0;
  int m_cap = 50;
  double tau = 1e-2;
  std::string out_dir = "out";
  bool dump_modes = false;
  bool dump_graph = false;
  bool allow_disconnected = false;

  PipelineConfig pipeline() const;
};

// Full clustering run: labels.csv/labels.pgm/provenance.csv/report.json in
// out_dir (+ metrics in the report when ground truth is available).
int run_cluster(const RunConfig& cfg);

// One clustering run per radius; per-radius artifacts in subdirectories and a
// sweep.csv summary. Individual failures become status rows, not aborts.
int run_sweep(const RunConfig& cfg, const std::vector<double>& radii);

// K-means on the raw spectra with the same evaluation path.
int run_kmeans(const RunConfig& cfg);

// Renders a label grid (.csv or .pgm) to a PPM using a fixed 16-color
// palette, label 0 black. palette_path: optional "R G B" lines overriding it.
int run_render(const std::string& labels_path, const std::string& out_path,
               const std::string& palette_path);

// Synthetic stripes dataset written in the native format.
int run_synth(const std::string& out_path, int height, int width, int bands,
              int classes, double noise_sigma, uint64_t seed);

} // namespace srdl
