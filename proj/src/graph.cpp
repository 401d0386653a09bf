#include "srdl/graph.hpp"

#include "srdl/errors.hpp"
#include "srdl/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace srdl {

void GraphConfig::validate() const {
  if (k < 1) throw input_error("graph k must be >= 1");
  if (!(radius > 0.0)) throw input_error("spatial radius must be positive (or inf)");
  if (sigma_mode == SigmaMode::fixed && !(sigma > 0.0)) {
    throw input_error("fixed sigma must be positive");
  }
  if (!(sigma_multiplier > 0.0)) throw input_error("sigma multiplier must be positive");
}

double kernel_weight(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double sigma) {
  if (!(sigma > 0.0)) throw input_error("kernel sigma must be positive");
  if (!x.allFinite() || !y.allFinite()) throw input_error("kernel input has non-finite values");
  const double d2 = (x - y).squaredNorm();
  return d2 == 0.0 ? 1.0 : std::exp(-d2 / (sigma * sigma));
}

namespace {

// Offsets (dr, dc) with 0 < dr^2 + dc^2 <= r^2, fixed scan order.
std::vector<std::pair<int, int>> disk_offsets(double radius) {
  const int ir = static_cast<int>(std::floor(radius));
  std::vector<std::pair<int, int>> offsets;
  offsets.reserve(static_cast<size_t>(2 * ir + 1) * (2 * ir + 1));
  for (int dr = -ir; dr <= ir; ++dr)
    for (int dc = -ir; dc <= ir; ++dc)
      if ((dr || dc) && dr * dr + dc * dc <= radius * radius)
        offsets.emplace_back(dr, dc);
  return offsets;
}

struct DirectedEdge {
  int from;
  int to;
  double dist;
};

} // namespace

std::vector<PixelIndex> spatial_candidates(int height, int width, const PixelIndex& p,
                                           double radius) {
  if (p.row < 0 || p.row >= height || p.col < 0 || p.col >= width) {
    throw input_error("spatial_candidates: pixel out of bounds");
  }
  std::vector<PixelIndex> out;
  if (std::isinf(radius)) {
    out.reserve(static_cast<size_t>(height) * width - 1);
    for (int f = 0; f < height * width; ++f)
      if (f != p.flat) out.push_back(PixelIndex::from_flat(f, width));
    return out;
  }
  for (const auto& [dr, dc] : disk_offsets(radius)) {
    const int r = p.row + dr, c = p.col + dc;
    if (r >= 0 && r < height && c >= 0 && c < width)
      out.push_back(PixelIndex::from_rc(r, c, width));
  }
  return out;
}

std::vector<PixelIndex> spatial_candidates(const HsiCube& cube, const PixelIndex& p,
                                           double radius) {
  return spatial_candidates(cube.height(), cube.width(), p, radius);
}

SparseMarkov build_graph(const HsiCube& cube, const GraphConfig& cfg) {
  cfg.validate();
  cube.validate("build_graph");
  const int n = cube.pixels();
  const int w = cube.width();
  const int h = cube.height();
  const auto spectra = cube.spectra();

  const bool infinite = std::isinf(cfg.radius);
  const auto offsets = infinite ? std::vector<std::pair<int, int>>{} : disk_offsets(cfg.radius);

  // Per-pixel k nearest spectral neighbors inside the spatial disk.
  std::vector<std::vector<std::pair<double, int>>> nn(n); // (distance, flat)
  std::vector<std::pair<double, int>> cand;
  for (int flat = 0; flat < n; ++flat) {
    const int pr = flat / w, pc = flat % w;
    cand.clear();
    if (infinite) {
      for (int q = 0; q < n; ++q) {
        if (q == flat) continue;
        cand.emplace_back((spectra.row(flat) - spectra.row(q)).norm(), q);
      }
    } else {
      for (const auto& [dr, dc] : offsets) {
        const int r = pr + dr, c = pc + dc;
        if (r < 0 || r >= h || c < 0 || c >= w) continue;
        const int q = r * w + c;
        cand.emplace_back((spectra.row(flat) - spectra.row(q)).norm(), q);
      }
    }
    if (cand.empty()) {
      throw numeric_error("pixel (" + std::to_string(pr) + "," + std::to_string(pc) +
                          ") has no spatial candidates; increase the radius");
    }
    const size_t keep = std::min<size_t>(cfg.k, cand.size());
    // equidistant k-th neighbors resolved by lower flat index
    std::partial_sort(cand.begin(), cand.begin() + keep, cand.end());
    nn[flat].assign(cand.begin(), cand.begin() + keep);
  }

  double sigma = cfg.sigma;
  if (cfg.sigma_mode == GraphConfig::SigmaMode::adaptive) {
    double sum = 0.0;
    size_t count = 0;
    for (const auto& list : nn) {
      for (const auto& [d, q] : list) sum += d;
      count += list.size();
    }
    sigma = cfg.sigma_multiplier * (sum / static_cast<double>(count));
    if (!(sigma > 0.0)) sigma = 1.0; // all retained distances zero: every weight is exp(0)
  }

  // Kernel weights are symmetric in the pair, so max-symmetrization is the
  // union of directed patterns carrying the shared value.
  std::vector<DirectedEdge> edges;
  edges.reserve(static_cast<size_t>(n) * cfg.k);
  for (int x = 0; x < n; ++x) {
    for (const auto& [d, y] : nn[x]) {
      edges.push_back({std::min(x, y), std::max(x, y), d});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const DirectedEdge& a, const DirectedEdge& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const DirectedEdge& a, const DirectedEdge& b) {
                            return a.from == b.from && a.to == b.to;
                          }),
              edges.end());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * 2);
  const double inv_s2 = 1.0 / (sigma * sigma);
  for (const auto& e : edges) {
    const double wgt = e.dist == 0.0 ? 1.0 : std::exp(-e.dist * e.dist * inv_s2);
    triplets.emplace_back(e.from, e.to, wgt);
    triplets.emplace_back(e.to, e.from, wgt);
  }

  SparseMarkov g;
  g.n = n;
  g.sigma = sigma;
  g.W.resize(n, n);
  g.W.setFromTriplets(triplets.begin(), triplets.end());
  g.W.makeCompressed();

  g.deg = g.W * Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) {
    if (!(g.deg[i] > 0.0)) {
      throw numeric_error("pixel (" + std::to_string(i / w) + "," + std::to_string(i % w) +
                          ") is isolated (degree 0)");
    }
  }

  g.P = g.W;
  for (int i = 0; i < n; ++i) {
    const double inv = 1.0 / g.deg[i];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.P, i); it; ++it) {
      it.valueRef() *= inv;
    }
  }

  if (!cfg.allow_disconnected && !is_connected(g)) {
    throw numeric_error("graph is disconnected; increase the spatial radius or k, "
                        "or allow disconnected graphs explicitly");
  }
  return g;
}

SparseMarkov markov_from_weights(const Eigen::SparseMatrix<double>& W, double sigma) {
  Eigen::SparseMatrix<double> diff = W - Eigen::SparseMatrix<double>(W.transpose());
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
      if (it.value() != 0.0) throw input_error("weight matrix must be symmetric");
    }
  }
  SparseMarkov g;
  g.n = static_cast<int>(W.rows());
  g.sigma = sigma;
  g.W = W;
  g.W.prune([](int r, int c, double v) {
    if (v < 0.0) throw input_error("weight matrix must be nonnegative");
    return r != c && v != 0.0;
  });
  g.W.makeCompressed();
  g.deg = g.W * Eigen::VectorXd::Ones(g.n);
  for (int i = 0; i < g.n; ++i) {
    if (!(g.deg[i] > 0.0)) {
      throw numeric_error("vertex " + std::to_string(i) + " is isolated (degree 0)");
    }
  }
  g.P = g.W;
  for (int i = 0; i < g.n; ++i) {
    const double inv = 1.0 / g.deg[i];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.P, i); it; ++it) {
      it.valueRef() *= inv;
    }
  }
  return g;
}

bool is_connected(const SparseMarkov& g) {
  if (g.n == 0) return false;
  std::vector<char> seen(g.n, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.W, v); it; ++it) {
      const int u = static_cast<int>(it.col());
      if (!seen[u]) {
        seen[u] = 1;
        ++visited;
        stack.push_back(u);
      }
    }
  }
  return visited == g.n;
}

void dump_coo(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path);
  out.precision(17);
  for (int i = 0; i < m.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, i); it; ++it) {
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
    }
  }
}

} // namespace srdl
