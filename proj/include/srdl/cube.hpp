#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

namespace srdl {

// 0-based pixel coordinate with its flattened (row-major) index.
struct PixelIndex {
  int row = 0;
  int col = 0;
  int flat = 0;

  static PixelIndex from_flat(int flat, int width) {
    return {flat / width, flat % width, flat};
  }
  static PixelIndex from_rc(int row, int col, int width) {
    return {row, col, row * width + col};
  }
};

// Hyperspectral cube: height x width pixels, each a D-band spectrum.
// Storage is pixel-major: data[flat * bands + b]. Optional per-pixel
// ground-truth labels, 0 = unlabeled.
class HsiCube {
public:
  HsiCube() = default;
  HsiCube(int height, int width, int bands);

  int height() const { return height_; }
  int width() const { return width_; }
  int bands() const { return bands_; }
  int pixels() const { return height_ * width_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool has_gt() const { return gt_.has_value(); }
  const std::vector<int>& gt() const { return *gt_; }
  void set_gt(std::vector<int> gt);
  void clear_gt() { gt_.reset(); }

  double& at(int row, int col, int band) {
    return data_[(static_cast<size_t>(row) * width_ + col) * bands_ + band];
  }
  double at(int row, int col, int band) const {
    return data_[(static_cast<size_t>(row) * width_ + col) * bands_ + band];
  }

  // Spectrum of one pixel as an Eigen view over the pixel-major buffer.
  Eigen::Map<const Eigen::VectorXd> spectrum(int flat) const {
    return {data_.data() + static_cast<size_t>(flat) * bands_, bands_};
  }
  Eigen::Map<Eigen::VectorXd> spectrum(int flat) {
    return {data_.data() + static_cast<size_t>(flat) * bands_, bands_};
  }

  // N x D row view of all spectra (no copy).
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  spectra() const {
    return {data_.data(), pixels(), bands_};
  }

  // Throws input_error on any invariant violation (shape, non-finite values,
  // gt size). `where` prefixes the message.
  void validate(const char* where = "cube") const;

private:
  int height_ = 0;
  int width_ = 0;
  int bands_ = 0;
  std::vector<double> data_;
  std::optional<std::vector<int>> gt_;
};

// Adds seeded i.i.d. zero-mean Gaussian noise of the given variance to every
// spectral value. variance must lie in (0, 1e-3]. Deterministic: the generator
// is a fixed Box-Muller over mt19937_64, so equal seeds give equal cubes on
// any platform.
HsiCube jitter_duplicates(const HsiCube& cube, double variance, uint64_t seed);

// Sub-cube over [row0, row1) x [col0, col1); gt cropped identically.
HsiCube crop(const HsiCube& cube, int row0, int row1, int col0, int col1);

// Synthetic dataset of K horizontal stripes. Class c's mean spectrum is a
// shared offset plus an amplitude on band c-1; i.i.d. Gaussian noise of
// std-dev noise_sigma is added; gt holds stripe ids 1..K.
HsiCube synth_stripes(int height, int width, int bands, int classes,
                      double noise_sigma, uint64_t seed);

} // namespace srdl
