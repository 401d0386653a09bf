#include "srdl/cli.hpp"
#include "srdl/errors.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace {

double parse_radius(const std::string& s) {
  std::string low = s;
  for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (low == "inf" || low == "infinity") return srdl::kRadiusInf;
  try {
    size_t pos = 0;
    const double r = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return r;
  } catch (const std::exception&) {
    throw srdl::input_error("radius must be a number or 'inf', got '" + s + "'");
  }
}

int parse_clusters(const std::string& s) {
  if (s == "auto") return 0;
  try {
    size_t pos = 0;
    const int k = std::stoi(s, &pos);
    if (pos != s.size() || k < 0) throw std::invalid_argument(s);
    return k;
  } catch (const std::exception&) {
    throw srdl::input_error("--clusters must be a non-negative integer or 'auto', got '" +
                            s + "'");
  }
}

struct CommonFlags {
  std::string radius = "inf";
  std::string clusters = "auto";
};

void add_common(CLI::App* cmd, srdl::RunConfig& cfg, CommonFlags& flags) {
  cmd->add_option("-i,--input", cfg.input, "input cube path")->required();
  cmd->add_option("-f,--format", cfg.format, "input format: native|envi|csv")
      ->capture_default_str();
  cmd->add_option("--gt", cfg.gt_path, "ground-truth label grid CSV (overrides bundled gt)");
  cmd->add_option("-r,--radius", flags.radius, "spatial graph radius in pixels, or 'inf'")
      ->capture_default_str();
  cmd->add_option("-k,--k", cfg.k, "spectral nearest neighbors per pixel")
      ->capture_default_str();
  cmd->add_option("-t,--t", cfg.t, "diffusion time")->capture_default_str();
  cmd->add_option("-K,--clusters", flags.clusters, "cluster count, or 'auto'")
      ->capture_default_str();
  cmd->add_option("--kmax", cfg.k_max, "upper bound for the auto cluster count")
      ->capture_default_str();
  cmd->add_option("--sigma", cfg.sigma, "fixed kernel scale (0 = adaptive)")
      ->capture_default_str();
  cmd->add_option("--sigma-multiplier", cfg.sigma_multiplier,
                  "multiplier on the adaptive kernel scale")
      ->capture_default_str();
  cmd->add_option("--kde-knn", cfg.kde_knn, "neighbors in the density estimate")
      ->capture_default_str();
  cmd->add_option("--kde-bandwidth", cfg.kde_bandwidth,
                  "density kernel bandwidth (0 = mean knn-th neighbor distance)")
      ->capture_default_str();
  cmd->add_option("--consensus-radius", cfg.consensus_radius,
                  "spatial consensus disk (0 = graph radius)")
      ->capture_default_str();
  cmd->add_option("--consensus-threshold", cfg.consensus_threshold,
                  "share a consensus label must strictly exceed (>1 disables)")
      ->capture_default_str();
  cmd->add_option("--jitter-variance", cfg.jitter_variance,
                  "Gaussian jitter variance applied after loading (0 = off)")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "seed for jitter / k-means")->capture_default_str();
  cmd->add_option("--m-cap", cfg.m_cap, "most eigenpairs ever retained")
      ->capture_default_str();
  cmd->add_option("--tau", cfg.tau, "eigenvalue-decay cutoff for the embedding size")
      ->capture_default_str();
  cmd->add_option("-o,--out", cfg.out_dir, "output directory")->capture_default_str();
  cmd->add_flag("--dump-modes", cfg.dump_modes, "write per-pixel density/gap CSV");
  cmd->add_flag("--dump-graph", cfg.dump_graph, "write W and P as coordinate lists");
  cmd->add_flag("--allow-disconnected", cfg.allow_disconnected,
                "proceed when the graph is disconnected");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatially regularized diffusion clustering for hyperspectral cubes"};
  app.require_subcommand(1);

  srdl::RunConfig cfg;
  CommonFlags flags;

  CLI::App* cluster = app.add_subcommand("cluster", "full clustering run");
  add_common(cluster, cfg, flags);

  CLI::App* sweep = app.add_subcommand("sweep", "clustering runs over a list of radii");
  add_common(sweep, cfg, flags);
  std::vector<std::string> radii_str;
  sweep->add_option("--radii", radii_str, "comma-separated radii (numbers or 'inf')")
      ->required()
      ->delimiter(',');

  CLI::App* km = app.add_subcommand("kmeans", "k-means baseline on raw spectra");
  add_common(km, cfg, flags);

  CLI::App* render = app.add_subcommand("render", "label map to PPM image");
  std::string labels_path, render_out = "labels.ppm", palette_path;
  render->add_option("-i,--labels", labels_path, "label grid CSV or 16-bit PGM")
      ->required();
  render->add_option("-o,--out", render_out, "output PPM path")->capture_default_str();
  render->add_option("--palette", palette_path, "palette file, one 'R G B' line per label");

  CLI::App* synth = app.add_subcommand("synth", "generate a striped synthetic cube");
  std::string synth_out = "synthetic";
  int s_height = 40, s_width = 40, s_bands = 30, s_classes = 4;
  double s_noise = 0.05;
  uint64_t s_seed = 0;
  synth->add_option("-o,--out", synth_out, "output path (native format)")
      ->capture_default_str();
  synth->add_option("--height", s_height, "rows")->capture_default_str();
  synth->add_option("--width", s_width, "columns")->capture_default_str();
  synth->add_option("--bands", s_bands, "spectral bands")->capture_default_str();
  synth->add_option("--classes", s_classes, "stripe count")->capture_default_str();
  synth->add_option("--noise", s_noise, "Gaussian noise std-dev")->capture_default_str();
  synth->add_option("--seed", s_seed, "noise seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cluster) || app.got_subcommand(sweep) ||
        app.got_subcommand(km)) {
      cfg.radius = parse_radius(flags.radius);
      cfg.clusters = parse_clusters(flags.clusters);
    }
    if (app.got_subcommand(cluster)) return srdl::run_cluster(cfg);
    if (app.got_subcommand(sweep)) {
      std::vector<double> radii;
      radii.reserve(radii_str.size());
      for (const std::string& s : radii_str) radii.push_back(parse_radius(s));
      return srdl::run_sweep(cfg, radii);
    }
    if (app.got_subcommand(km)) return srdl::run_kmeans(cfg);
    if (app.got_subcommand(render)) {
      return srdl::run_render(labels_path, render_out, palette_path);
    }
    if (app.got_subcommand(synth)) {
      return srdl::run_synth(synth_out, s_height, s_width, s_bands, s_classes,
                             s_noise, s_seed);
    }
  } catch (const srdl::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const srdl::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
