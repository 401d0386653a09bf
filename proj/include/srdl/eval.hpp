#pragma once

#include "srdl/labeling.hpp"

#include <vector>

namespace srdl {

// Rows are ground-truth classes 1..classes, columns the aligned predictions.
// `classes` covers both gt ids and any surplus cluster ids, so total always
// equals the number of gt-labeled pixels.
struct Confusion {
  int classes = 0;
  std::vector<std::vector<long long>> matrix;
  long long total = 0;
};

// Cluster -> class assignment maximizing total agreement over gt-labeled
// pixels (optimal assignment, Hungarian). Entry k is the class for cluster k
// (entry 0 unused); surplus clusters receive distinct otherwise-unused ids.
std::vector<int> align(const std::vector<int>& pred, const std::vector<int>& gt);

// Counts over gt-labeled pixels after applying `assignment` to pred.
Confusion confusion_matrix(const std::vector<int>& pred, const std::vector<int>& gt,
                           const std::vector<int>& assignment);

double overall_accuracy(const Confusion& conf);

// Mean per-class recall. Classes with no gt pixels are skipped; their ids are
// appended to *excluded when given (callers surface the warning).
double average_accuracy(const Confusion& conf, std::vector<int>* excluded = nullptr);

// Cohen's kappa. The degenerate single-cell case (chance agreement 1) returns
// 0 and sets *degenerate when given.
double kappa(const Confusion& conf, bool* degenerate = nullptr);

struct EvalReport {
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  Confusion confusion;
  std::vector<int> alignment;
  std::vector<int> aa_excluded;
  bool kappa_degenerate = false;
};

// Full scoring pass: align, count, OA/AA/kappa. Pixels with gt 0 are ignored;
// pred must label every pixel.
EvalReport evaluate(const std::vector<int>& pred, const std::vector<int>& gt);
EvalReport evaluate(const LabelMap& pred, const std::vector<int>& gt);

} // namespace srdl
