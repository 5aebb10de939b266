#include "reconstruction.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "recognition.hpp"

namespace bqpca {

namespace {

Eigen::VectorXd inverse_weights(std::span<const double> d, Transform t, const char* side) {
  Eigen::VectorXd w = transform_weights(d, t);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0 || !std::isfinite(1.0 / w[i])) {
      fail(ErrorCode::InvalidWeight, std::string("reconstruct: zero ") + side +
                                         " weight at direction " + std::to_string(i + 1));
    }
    w[i] = 1.0 / w[i];
  }
  return w;
}

}  // namespace

QMatrix reconstruct(const QMatrix& features, const BasisPair& basis,
                    const WeightingScheme& scheme) {
  if (features.rows() != basis.k1() || features.cols() != basis.k2()) {
    fail(ErrorCode::Shape, "reconstruct: feature matrix is " + std::to_string(features.rows()) +
                               "x" + std::to_string(features.cols()) + ", basis has k1 = " +
                               std::to_string(basis.k1()) + ", k2 = " + std::to_string(basis.k2()));
  }
  QMatrix p = features;
  if (weights_left(scheme.manner)) {
    p = scale_rows(p, inverse_weights(basis.d_left, scheme.transform, "left"));
  }
  if (weights_right(scheme.manner)) {
    p = scale_cols(p, inverse_weights(basis.d_right, scheme.transform, "right"));
  }
  return matmul(matmul(basis.u, p), conj_transpose(basis.v)) + basis.mean;
}

SampleSet reconstruct_set(const SampleSet& set, const BasisPair& basis,
                          const WeightingScheme& scheme) {
  SampleSet out;
  const auto images = centered_images(set, basis);
  for (std::size_t i = 0; i < images.size(); ++i) {
    Sample s = set.samples[i];
    s.image = reconstruct(project(images[i], basis, scheme), basis, scheme);
    out.samples.push_back(std::move(s));
  }
  return out;
}

double reconstruction_ratio(std::span<const QMatrix> originals, std::span<const QMatrix> recs) {
  if (originals.empty()) fail(ErrorCode::InvalidDataset, "reconstruction_ratio: no samples");
  if (originals.size() != recs.size()) {
    fail(ErrorCode::Shape, "reconstruction_ratio: " + std::to_string(originals.size()) +
                               " originals but " + std::to_string(recs.size()) +
                               " reconstructions");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const double norm = fro_norm(originals[i]);
    if (norm == 0.0) {
      fail(ErrorCode::InvalidDataset,
           "reconstruction_ratio: original " + std::to_string(i) + " is the zero image");
    }
    acc += 1.0 - fro_norm(originals[i] - recs[i]) / norm;
  }
  return acc / static_cast<double>(originals.size());
}

}  // namespace bqpca
