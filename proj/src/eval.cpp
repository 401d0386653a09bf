#include "srdl/eval.hpp"

#include "srdl/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace srdl {

namespace {

// O(n^3) Hungarian algorithm over integer costs (minimization, potentials
// form). Returns the column assigned to each row.
std::vector<int> hungarian_min(const std::vector<std::vector<long long>>& cost) {
  const int n = static_cast<int>(cost.size());
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      long long delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j) row_to_col[static_cast<size_t>(p[j] - 1)] = j - 1;
  return row_to_col;
}

void check_sizes(const std::vector<int>& pred, const std::vector<int>& gt) {
  if (pred.size() != gt.size()) {
    throw input_error("evaluate: " + std::to_string(pred.size()) +
                      " predictions vs " + std::to_string(gt.size()) + " gt labels");
  }
  if (pred.empty()) throw input_error("evaluate: empty label vectors");
}

} // namespace

std::vector<int> align(const std::vector<int>& pred, const std::vector<int>& gt) {
  check_sizes(pred, gt);
  int max_gt = 0, max_pred = 0;
  long long labeled = 0;
  for (size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] < 0) throw input_error("align: negative gt label");
    if (gt[i] == 0) continue;
    ++labeled;
    if (pred[i] < 1) {
      throw input_error("align: prediction must label every pixel (pixel " +
                        std::to_string(i) + " has " + std::to_string(pred[i]) + ")");
    }
    max_gt = std::max(max_gt, gt[i]);
    max_pred = std::max(max_pred, pred[i]);
  }
  for (int lab : pred) max_pred = std::max(max_pred, lab);
  if (labeled == 0) throw input_error("align: ground truth has no labeled pixels");

  // Square the problem: virtual classes beyond max_gt absorb surplus
  // clusters, virtual clusters beyond max_pred absorb surplus classes.
  const int n = std::max(max_gt, max_pred);
  std::vector<std::vector<long long>> agree(
      static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
  for (size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == 0) continue;
    ++agree[static_cast<size_t>(pred[i] - 1)][static_cast<size_t>(gt[i] - 1)];
  }
  std::vector<std::vector<long long>> cost(
      static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < n; ++c) cost[k][c] = -agree[k][c];

  const std::vector<int> row_to_col = hungarian_min(cost);
  std::vector<int> assignment(static_cast<size_t>(max_pred) + 1, 0);
  for (int k = 1; k <= max_pred; ++k)
    assignment[static_cast<size_t>(k)] = row_to_col[static_cast<size_t>(k - 1)] + 1;
  return assignment;
}

Confusion confusion_matrix(const std::vector<int>& pred, const std::vector<int>& gt,
                           const std::vector<int>& assignment) {
  check_sizes(pred, gt);
  int classes = 0;
  for (int lab : gt) classes = std::max(classes, lab);
  for (size_t k = 1; k < assignment.size(); ++k)
    classes = std::max(classes, assignment[k]);
  if (classes == 0) throw input_error("confusion: no labels present");

  Confusion conf;
  conf.classes = classes;
  conf.matrix.assign(static_cast<size_t>(classes),
                     std::vector<long long>(static_cast<size_t>(classes), 0));
  for (size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == 0) continue;
    if (pred[i] < 1 || pred[i] >= static_cast<int>(assignment.size())) {
      throw input_error("confusion: prediction " + std::to_string(pred[i]) +
                        " outside the alignment at pixel " + std::to_string(i));
    }
    const int mapped = assignment[static_cast<size_t>(pred[i])];
    ++conf.matrix[static_cast<size_t>(gt[i] - 1)][static_cast<size_t>(mapped - 1)];
    ++conf.total;
  }
  if (conf.total == 0) throw input_error("confusion: ground truth has no labeled pixels");
  return conf;
}

double overall_accuracy(const Confusion& conf) {
  if (conf.total <= 0) throw input_error("overall_accuracy: empty confusion");
  long long trace = 0;
  for (int c = 0; c < conf.classes; ++c) trace += conf.matrix[c][c];
  return static_cast<double>(trace) / static_cast<double>(conf.total);
}

double average_accuracy(const Confusion& conf, std::vector<int>* excluded) {
  if (conf.total <= 0) throw input_error("average_accuracy: empty confusion");
  double sum = 0.0;
  int rows = 0;
  for (int c = 0; c < conf.classes; ++c) {
    long long row = 0;
    for (int j = 0; j < conf.classes; ++j) row += conf.matrix[c][j];
    if (row == 0) {
      if (excluded) excluded->push_back(c + 1);
      continue;
    }
    sum += static_cast<double>(conf.matrix[c][c]) / static_cast<double>(row);
    ++rows;
  }
  if (rows == 0) throw input_error("average_accuracy: all classes empty");
  return sum / rows;
}

double kappa(const Confusion& conf, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (conf.total <= 0) throw input_error("kappa: empty confusion");
  long long trace = 0;
  double pe = 0.0;
  const double total = static_cast<double>(conf.total);
  for (int c = 0; c < conf.classes; ++c) {
    trace += conf.matrix[c][c];
    long long row = 0, col = 0;
    for (int j = 0; j < conf.classes; ++j) {
      row += conf.matrix[c][j];
      col += conf.matrix[j][c];
    }
    pe += static_cast<double>(row) * static_cast<double>(col) / (total * total);
  }
  const double po = static_cast<double>(trace) / total;
  if (pe >= 1.0) {
    // Single populated row/column pair: chance agreement saturates.
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return (po - pe) / (1.0 - pe);
}

EvalReport evaluate(const std::vector<int>& pred, const std::vector<int>& gt) {
  check_sizes(pred, gt);
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 1) {
      throw input_error("evaluate: prediction must label every pixel (pixel " +
                        std::to_string(i) + " has " + std::to_string(pred[i]) + ")");
    }
  }
  EvalReport rep;
  rep.alignment = align(pred, gt);
  rep.confusion = confusion_matrix(pred, gt, rep.alignment);
  rep.oa = overall_accuracy(rep.confusion);
  rep.aa = average_accuracy(rep.confusion, &rep.aa_excluded);
  rep.kappa = srdl::kappa(rep.confusion, &rep.kappa_degenerate);
  return rep;
}

EvalReport evaluate(const LabelMap& pred, const std::vector<int>& gt) {
  return evaluate(pred.labels, gt);
}

} // namespace srdl
