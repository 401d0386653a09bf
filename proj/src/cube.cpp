#include "srdl/cube.hpp"

#include "srdl/errors.hpp"
#include "srdl/rng.hpp"

#include <cmath>
#include <sstream>

namespace srdl {

HsiCube::HsiCube(int height, int width, int bands)
    : height_(height), width_(width), bands_(bands),
      data_(static_cast<size_t>(height) * width * bands, 0.0) {
  validate("cube");
}

void HsiCube::set_gt(std::vector<int> gt) {
  if (static_cast<int>(gt.size()) != pixels()) {
    throw input_error("gt size " + std::to_string(gt.size()) +
                      " does not match pixel count " + std::to_string(pixels()));
  }
  for (size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] < 0) {
      throw input_error("gt labels must be non-negative, got " +
                        std::to_string(gt[i]) + " at pixel " + std::to_string(i));
    }
  }
  gt_ = std::move(gt);
}

void HsiCube::validate(const char* where) const {
  std::ostringstream err;
  if (height_ < 2 || width_ < 2 || bands_ < 1) {
    err << where << ": degenerate dimensions " << height_ << "x" << width_
        << "x" << bands_ << " (need height>=2, width>=2, bands>=1)";
    throw input_error(err.str());
  }
  const size_t expect = static_cast<size_t>(height_) * width_ * bands_;
  if (data_.size() != expect) {
    err << where << ": payload has " << data_.size() << " values, expected " << expect;
    throw input_error(err.str());
  }
  for (size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      err << where << ": non-finite value at offset " << i;
      throw input_error(err.str());
    }
  }
  if (gt_ && static_cast<int>(gt_->size()) != pixels()) {
    err << where << ": gt has " << gt_->size() << " entries, expected " << pixels();
    throw input_error(err.str());
  }
}

HsiCube jitter_duplicates(const HsiCube& cube, double variance, uint64_t seed) {
  if (!(variance > 0.0) || variance > 1e-3) {
    throw input_error("jitter variance must lie in (0, 1e-3], got " +
                      std::to_string(variance));
  }
  HsiCube out = cube;
  Rng noise(seed);
  const double stddev = std::sqrt(variance);
  for (double& v : out.data()) v += noise.gaussian(stddev);
  return out;
}

HsiCube crop(const HsiCube& cube, int row0, int row1, int col0, int col1) {
  if (row0 < 0 || col0 < 0 || row1 > cube.height() || col1 > cube.width() ||
      row0 >= row1 || col0 >= col1) {
    std::ostringstream err;
    err << "crop range [" << row0 << "," << row1 << ")x[" << col0 << "," << col1
        << ") invalid for " << cube.height() << "x" << cube.width() << " cube";
    throw input_error(err.str());
  }
  HsiCube out(row1 - row0, col1 - col0, cube.bands());
  for (int r = row0; r < row1; ++r)
    for (int c = col0; c < col1; ++c)
      for (int b = 0; b < cube.bands(); ++b)
        out.at(r - row0, c - col0, b) = cube.at(r, c, b);
  if (cube.has_gt()) {
    std::vector<int> gt(static_cast<size_t>(out.pixels()));
    for (int r = row0; r < row1; ++r)
      for (int c = col0; c < col1; ++c)
        gt[(r - row0) * out.width() + (c - col0)] = cube.gt()[r * cube.width() + c];
    out.set_gt(std::move(gt));
  }
  return out;
}

HsiCube synth_stripes(int height, int width, int bands, int classes,
                      double noise_sigma, uint64_t seed) {
  if (height < 2 || width < 2 || bands < 1) {
    throw input_error("synth_stripes: degenerate dimensions");
  }
  if (classes < 1 || classes > height || bands < classes) {
    throw input_error("synth_stripes: need 1 <= classes <= height and bands >= classes");
  }
  if (noise_sigma < 0.0) {
    throw input_error("synth_stripes: noise_sigma must be >= 0");
  }

  const double offset = 0.2;
  const double amplitude = 1.5;

  HsiCube out(height, width, bands);
  std::vector<int> gt(static_cast<size_t>(out.pixels()));
  Rng noise(seed);
  for (int r = 0; r < height; ++r) {
    // stripe id in 1..classes, rows split as evenly as possible
    const int cls = std::min(classes, r * classes / height + 1);
    for (int c = 0; c < width; ++c) {
      gt[r * width + c] = cls;
      for (int b = 0; b < bands; ++b) {
        double v = offset + (b == cls - 1 ? amplitude : 0.0);
        if (noise_sigma > 0.0) v += noise.gaussian(noise_sigma);
        out.at(r, c, b) = v;
      }
    }
  }
  out.set_gt(std::move(gt));
  return out;
}

} // namespace srdl
