#include "srdl/cli.hpp"

#include "srdl/errors.hpp"
#include "srdl/eval.hpp"
#include "srdl/io.hpp"
#include "srdl/kmeans.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace srdl {

namespace {

std::string now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json radius_json(double r) {
  if (std::isinf(r)) return json("inf");
  return json(r);
}

std::string radius_tag(double r) {
  if (std::isinf(r)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", r);
  return buf;
}

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string("fnv1a:") + buf;
}

// Fingerprint of the loaded cube (dims, spectra bytes, ground truth), so the
// report's input stamp tracks the data itself rather than its container.
uint64_t cube_fingerprint(const HsiCube& cube) {
  uint64_t h = fnv1a_bytes(nullptr, 0);
  const int dims[3] = {cube.height(), cube.width(), cube.bands()};
  h = fnv1a_bytes(dims, sizeof(dims), h);
  h = fnv1a_bytes(cube.data().data(), cube.data().size() * sizeof(double), h);
  const int has_gt = cube.has_gt() ? 1 : 0;
  h = fnv1a_bytes(&has_gt, sizeof(has_gt), h);
  if (cube.has_gt()) {
    h = fnv1a_bytes(cube.gt().data(), cube.gt().size() * sizeof(int), h);
  }
  return h;
}

json config_json(const RunConfig& cfg) {
  return json{
      {"input", cfg.input},
      {"format", cfg.format},
      {"gt", cfg.gt_path},
      {"radius", radius_json(cfg.radius)},
      {"k", cfg.k},
      {"t", cfg.t},
      {"clusters", cfg.clusters},
      {"kmax", cfg.k_max},
      {"sigma", cfg.sigma},
      {"sigma_multiplier", cfg.sigma_multiplier},
      {"kde_knn", cfg.kde_knn},
      {"kde_bandwidth", cfg.kde_bandwidth},
      {"consensus_radius", radius_json(cfg.consensus_radius)},
      {"consensus_threshold", cfg.consensus_threshold},
      {"jitter_variance", cfg.jitter_variance},
      {"seed", cfg.seed},
      {"m_cap", cfg.m_cap},
      {"tau", cfg.tau},
      {"out_dir", cfg.out_dir},
  };
}

HsiCube load_input(const RunConfig& cfg, uint64_t* fingerprint) {
  if (cfg.input.empty()) throw input_error("no input path given");
  HsiCube cube = load_cube(cfg.input, parse_format(cfg.format));
  if (!cfg.gt_path.empty()) {
    cube.set_gt(load_label_csv(cfg.gt_path, cube.height(), cube.width()));
  }
  if (fingerprint) *fingerprint = cube_fingerprint(cube);
  if (cfg.jitter_variance > 0.0) {
    cube = jitter_duplicates(cube, cfg.jitter_variance, cfg.seed);
  }
  return cube;
}

json metrics_json(const EvalReport& rep) {
  json conf = json::array();
  for (const auto& row : rep.confusion.matrix) conf.push_back(row);
  return json{
      {"oa", rep.oa},
      {"aa", rep.aa},
      {"kappa", rep.kappa},
      {"confusion", conf},
      {"alignment", rep.alignment},
      {"aa_excluded_classes", rep.aa_excluded},
      {"kappa_degenerate", rep.kappa_degenerate},
  };
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path);
  out << text;
  if (!out) throw input_error("short write to " + path);
}

void write_provenance_csv(const LabelMap& lm, const std::string& path) {
  std::ostringstream out;
  for (int r = 0; r < lm.height; ++r) {
    for (int c = 0; c < lm.width; ++c) {
      if (c) out << ',';
      out << provenance_name(lm.provenance[static_cast<size_t>(r) * lm.width + c]);
    }
    out << '\n';
  }
  write_text(path, out.str());
}

void write_modes_csv(const ModeModel& mm, int width, const std::string& path) {
  std::ostringstream out;
  out << "flat,row,col,p,rho_t,d_t,parent,is_mode\n";
  out << std::setprecision(17);
  std::vector<char> is_mode(mm.p.size(), 0);
  for (int m : mm.modes) is_mode[static_cast<size_t>(m)] = 1;
  for (int i = 0; i < static_cast<int>(mm.p.size()); ++i) {
    const PixelIndex px = PixelIndex::from_flat(i, width);
    out << i << ',' << px.row << ',' << px.col << ',' << mm.p[i] << ','
        << mm.rho_t[i] << ',' << mm.d_t[i] << ',' << mm.parent[static_cast<size_t>(i)]
        << ',' << static_cast<int>(is_mode[static_cast<size_t>(i)]) << '\n';
  }
  write_text(path, out.str());
}

struct ClusterSummary {
  bool have_metrics = false;
  EvalReport metrics;
  int k_used = 0;
  int m = 0;
  double sigma = 0.0;
  double seconds = 0.0;
};

// One full clustering run with all artifacts under cfg.out_dir.
ClusterSummary execute_cluster(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  uint64_t fingerprint = 0;
  const HsiCube cube = load_input(cfg, &fingerprint);

  SparseMarkov graph;
  const ClusterResult res = cluster(cube, cfg.pipeline(), &graph);

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  save_label_csv(res.labels.labels, cube.height(), cube.width(), (out / "labels.csv").string());
  save_label_pgm(res.labels.labels, cube.height(), cube.width(), (out / "labels.pgm").string());
  write_provenance_csv(res.labels, (out / "provenance.csv").string());
  if (cfg.dump_modes) write_modes_csv(res.modes, cube.width(), (out / "modes.csv").string());
  if (cfg.dump_graph) {
    dump_coo(graph.W, (out / "graph_w.txt").string());
    dump_coo(graph.P, (out / "graph_p.txt").string());
  }

  ClusterSummary sum;
  sum.k_used = static_cast<int>(res.modes.modes.size());
  sum.m = res.embedding.m;
  sum.sigma = res.graph_sigma;

  json mode_rows = json::array(), mode_cols = json::array();
  for (int m : res.modes.modes) {
    const PixelIndex px = PixelIndex::from_flat(m, cube.width());
    mode_rows.push_back(px.row);
    mode_cols.push_back(px.col);
  }
  std::vector<long long> label_counts(static_cast<size_t>(sum.k_used) + 1, 0);
  json prov_counts = json::object();
  for (int i = 0; i < cube.pixels(); ++i) {
    ++label_counts[static_cast<size_t>(res.labels.labels[static_cast<size_t>(i)])];
    const std::string name = provenance_name(res.labels.provenance[static_cast<size_t>(i)]);
    prov_counts[name] = prov_counts.value(name, 0LL) + 1;
  }

  json report{
      {"command", "cluster"},
      {"config", config_json(cfg)},
      {"input",
       {{"path", cfg.input},
        {"fingerprint", hex64(fingerprint)},
        {"height", cube.height()},
        {"width", cube.width()},
        {"bands", cube.bands()},
        {"has_gt", cube.has_gt()}}},
      {"graph", {{"sigma", res.graph_sigma}, {"nnz", graph.P.nonZeros()}}},
      {"embedding",
       {{"m", res.embedding.m},
        {"t", res.embedding.t},
        {"lambdas", std::vector<double>(res.embedding.lambdas.data(),
                                        res.embedding.lambdas.data() + res.embedding.m)}}},
      {"modes",
       {{"k_hat", res.modes.k_hat},
        {"k_degenerate", res.modes.k_degenerate},
        {"k_used", sum.k_used},
        {"kde_bandwidth", res.modes.kde_bandwidth},
        {"pixels", res.modes.modes},
        {"rows", mode_rows},
        {"cols", mode_cols}}},
      {"labels",
       {{"counts", std::vector<long long>(label_counts.begin() + 1, label_counts.end())},
        {"provenance_counts", prov_counts},
        {"consensus_radius", radius_json(res.labels.consensus_radius)},
        {"consensus_threshold", res.labels.consensus_threshold}}},
      {"metrics", nullptr},
      {"timestamp", now_iso8601()},
  };

  if (cube.has_gt()) {
    sum.metrics = evaluate(res.labels, cube.gt());
    sum.have_metrics = true;
    report["metrics"] = metrics_json(sum.metrics);
    for (int c : sum.metrics.aa_excluded) {
      std::cerr << "warning: ground-truth class " << c
                << " has no pixels; excluded from AA\n";
    }
    if (sum.metrics.kappa_degenerate) {
      std::cerr << "warning: degenerate confusion (chance agreement 1); kappa set to 0\n";
    }
  }
  if (res.modes.k_degenerate) {
    std::cerr << "warning: all mode scores equal; cluster-count estimate defaulted to 1\n";
  }

  write_text((out / "report.json").string(), report.dump(2) + "\n");
  sum.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sum;
}

void print_cluster_summary(const RunConfig& cfg, const ClusterSummary& sum) {
  std::ostringstream line;
  line << "cluster r=" << radius_tag(cfg.radius) << " k=" << cfg.k << " t=" << cfg.t
       << "  sigma=" << std::setprecision(6) << sum.sigma << " m=" << sum.m
       << " K=" << sum.k_used;
  if (sum.have_metrics) {
    line << "  OA=" << std::fixed << std::setprecision(4) << sum.metrics.oa
         << " AA=" << sum.metrics.aa << " kappa=" << sum.metrics.kappa;
  }
  line << "  [" << std::fixed << std::setprecision(2) << sum.seconds << "s] -> "
       << cfg.out_dir;
  std::cout << line.str() << "\n";
}

const std::vector<std::array<uint8_t, 3>>& default_palette() {
  static const std::vector<std::array<uint8_t, 3>> colors{
      {230, 25, 75},   {60, 180, 75},   {255, 225, 25},  {67, 99, 216},
      {245, 130, 49},  {145, 30, 180},  {66, 212, 244},  {240, 50, 230},
      {191, 239, 69},  {250, 190, 212}, {70, 153, 144},  {220, 190, 255},
      {154, 99, 36},   {255, 250, 200}, {128, 0, 0},     {170, 255, 195},
  };
  return colors;
}

std::vector<std::array<uint8_t, 3>> load_palette(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open palette " + path);
  std::vector<std::array<uint8_t, 3>> colors;
  int r, g, b;
  while (in >> r >> g >> b) {
    if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
      throw input_error(path + ": palette entries must be 0..255");
    }
    colors.push_back({static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                      static_cast<uint8_t>(b)});
  }
  if (colors.empty()) throw input_error(path + ": empty palette");
  return colors;
}

} // namespace

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig pc;
  pc.graph.k = k;
  pc.graph.radius = radius;
  pc.graph.sigma_mode =
      sigma > 0.0 ? GraphConfig::SigmaMode::fixed : GraphConfig::SigmaMode::adaptive;
  pc.graph.sigma = sigma;
  pc.graph.sigma_multiplier = sigma_multiplier;
  pc.graph.allow_disconnected = allow_disconnected;
  pc.t = t;
  pc.m_cap = m_cap;
  pc.tau = tau;
  pc.kde.knn = kde_knn;
  pc.kde.bandwidth = kde_bandwidth;
  pc.clusters = clusters;
  pc.k_max = k_max;
  pc.consensus_radius = consensus_radius;
  pc.consensus_threshold = consensus_threshold;
  return pc;
}

int run_cluster(const RunConfig& cfg) {
  const ClusterSummary sum = execute_cluster(cfg);
  print_cluster_summary(cfg, sum);
  return 0;
}

int run_sweep(const RunConfig& cfg, const std::vector<double>& radii) {
  if (radii.size() < 2) {
    throw input_error("sweep needs at least 2 radii, got " +
                      std::to_string(radii.size()));
  }
  fs::create_directories(cfg.out_dir);
  std::ostringstream csv;
  csv << "radius,status,oa,aa,kappa,k_used,m,sigma\n";
  for (double r : radii) {
    RunConfig sub = cfg;
    sub.radius = r;
    sub.out_dir = (fs::path(cfg.out_dir) / ("r_" + radius_tag(r))).string();
    csv << radius_tag(r) << ',';
    try {
      const ClusterSummary sum = execute_cluster(sub);
      csv << "ok,";
      if (sum.have_metrics) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f", sum.metrics.oa,
                      sum.metrics.aa, sum.metrics.kappa);
        csv << buf;
      } else {
        csv << ",,";
      }
      csv << ',' << sum.k_used << ',' << sum.m << ',' << std::setprecision(9)
          << sum.sigma << '\n';
      print_cluster_summary(sub, sum);
    } catch (const std::exception& e) {
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ';');
      csv << "error: " << msg << ",,,,,,\n";
      std::cout << "sweep r=" << radius_tag(r) << " failed: " << e.what() << "\n";
    }
  }
  write_text((fs::path(cfg.out_dir) / "sweep.csv").string(), csv.str());
  std::cout << "sweep -> " << (fs::path(cfg.out_dir) / "sweep.csv").string() << "\n";
  return 0;
}

int run_kmeans(const RunConfig& cfg) {
  if (cfg.clusters < 1) {
    throw input_error("kmeans requires an explicit --clusters value");
  }
  const auto t0 = std::chrono::steady_clock::now();
  uint64_t fingerprint = 0;
  const HsiCube cube = load_input(cfg, &fingerprint);

  KMeansConfig kc;
  kc.clusters = cfg.clusters;
  kc.seed = cfg.seed;
  const KMeansResult res = kmeans(cube, kc);

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  save_label_csv(res.labels, cube.height(), cube.width(), (out / "labels.csv").string());
  save_label_pgm(res.labels, cube.height(), cube.width(), (out / "labels.pgm").string());

  json report{
      {"command", "kmeans"},
      {"config", config_json(cfg)},
      {"input",
       {{"path", cfg.input},
        {"fingerprint", hex64(fingerprint)},
        {"height", cube.height()},
        {"width", cube.width()},
        {"bands", cube.bands()},
        {"has_gt", cube.has_gt()}}},
      {"kmeans",
       {{"inertia", res.inertia}, {"iters", res.iters}, {"converged", res.converged}}},
      {"metrics", nullptr},
      {"timestamp", now_iso8601()},
  };
  std::ostringstream line;
  line << "kmeans K=" << cfg.clusters << " iters=" << res.iters
       << " inertia=" << std::setprecision(6) << res.inertia;
  if (cube.has_gt()) {
    const EvalReport rep = evaluate(res.labels, cube.gt());
    report["metrics"] = metrics_json(rep);
    line << "  OA=" << std::fixed << std::setprecision(4) << rep.oa
         << " AA=" << rep.aa << " kappa=" << rep.kappa;
  }
  write_text((out / "report.json").string(), report.dump(2) + "\n");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  line << "  [" << std::fixed << std::setprecision(2) << secs << "s] -> " << cfg.out_dir;
  std::cout << line.str() << "\n";
  return 0;
}

int run_render(const std::string& labels_path, const std::string& out_path,
               const std::string& palette_path) {
  int height = 0, width = 0;
  std::vector<int> labels;
  if (labels_path.size() > 4 && labels_path.substr(labels_path.size() - 4) == ".pgm") {
    labels = load_label_pgm(labels_path, &height, &width);
  } else {
    labels = load_label_grid(labels_path, &height, &width);
  }
  const auto palette =
      palette_path.empty() ? default_palette() : load_palette(palette_path);

  int max_label = 0;
  for (int lab : labels) {
    if (lab < 0) throw input_error(labels_path + ": negative label");
    max_label = std::max(max_label, lab);
  }
  if (max_label > static_cast<int>(palette.size())) {
    throw input_error(labels_path + ": " + std::to_string(max_label) +
                      " labels exceed the " + std::to_string(palette.size()) +
                      "-color palette; pass an explicit palette file");
  }

  std::vector<uint8_t> rgb(static_cast<size_t>(height) * width * 3, 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) continue; // unlabeled stays black
    const auto& c = palette[static_cast<size_t>(labels[i] - 1)];
    rgb[i * 3 + 0] = c[0];
    rgb[i * 3 + 1] = c[1];
    rgb[i * 3 + 2] = c[2];
  }
  save_ppm(rgb, height, width, out_path);
  std::cout << "render " << width << "x" << height << " -> " << out_path << "\n";
  return 0;
}

int run_synth(const std::string& out_path, int height, int width, int bands,
              int classes, double noise_sigma, uint64_t seed) {
  const HsiCube cube = synth_stripes(height, width, bands, classes, noise_sigma, seed);
  if (!out_path.empty()) {
    const fs::path parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }
  save_cube(cube, out_path);
  std::string base = out_path;
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json") {
    base = base.substr(0, base.size() - 5);
  }
  std::cout << "synth " << height << "x" << width << "x" << bands << " classes="
            << classes << " -> " << base << ".json/.bin/.gt.csv\n";
  return 0;
}

} // namespace srdl
