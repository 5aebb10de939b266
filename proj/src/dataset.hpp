#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "quaternion.hpp"
#include "solver.hpp"

namespace bqpca {

enum class ImageFormat { Ppm, Png };

struct Sample {
  std::string label;
  QMatrix image;       // m x n, pixel (r, g, b) -> (r i + g j + b k) / 255
  std::string source;  // file name, or empty for in-memory samples
  ImageFormat format = ImageFormat::Ppm;
};

struct SampleSet {
  std::vector<Sample> samples;
  QMatrix mean;  // training mean; set by center()
  bool centered = false;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t rows() const { return samples.empty() ? 0 : samples.front().image.rows(); }
  std::size_t cols() const { return samples.empty() ? 0 : samples.front().image.cols(); }

  std::vector<QMatrix> images() const;
  /// Distinct labels in first-appearance order.
  std::vector<std::string> labels() const;
};

/// 8-bit interleaved RGB raster, row-major.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height
};

RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// Pure quaternion matrix of an RGB raster, channels scaled by 1/255.
QMatrix to_quaternion(const RgbImage& image);
/// Inverse map; i/j/k components are clipped to [0, 1] and rounded.
RgbImage to_rgb(const QMatrix& image);

/// Loads root/<label>/<image> for every class directory, in sorted
/// (label, file name) order. PNG and binary PPM files are accepted.
SampleSet load_dataset(const std::filesystem::path& root);

/// Writes every sample to dir/<label>/<source> in its original format.
void export_dataset(const SampleSet& set, const std::filesystem::path& dir);

/// Subtracts the sample mean from every image and records it.
SampleSet center(const SampleSet& set);

/// Subtracts a given mean (e.g. the training mean) from every image.
SampleSet center_with(const SampleSet& set, const QMatrix& mean);

struct Split {
  SampleSet train;
  SampleSet validation;
  SampleSet test;
};

/// Stratified per-class split, deterministic under seed. Every nonzero
/// fraction receives at least one sample per class; rounding leftovers go to
/// the training part.
Split split(const SampleSet& set, std::array<double, 3> fractions, std::uint64_t seed);

/// "BQP1" little-endian basis file.
void save_basis(const BasisPair& basis, const std::filesystem::path& path);
BasisPair load_basis(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_basis(const BasisPair& basis);
BasisPair decode_basis(std::span<const std::uint8_t> bytes);

}  // namespace bqpca
