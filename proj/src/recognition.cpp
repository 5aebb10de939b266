#include "recognition.hpp"

#include "error.hpp"

namespace bqpca {

std::vector<QMatrix> centered_images(const SampleSet& set, const BasisPair& basis) {
  std::vector<QMatrix> out;
  out.reserve(set.size());
  for (const auto& s : set.samples) {
    if (s.image.rows() != basis.rows() || s.image.cols() != basis.cols()) {
      fail(ErrorCode::Shape, "image '" + s.source + "' is " + std::to_string(s.image.rows()) +
                                 "x" + std::to_string(s.image.cols()) +
                                 " but the basis was fitted on " + std::to_string(basis.rows()) +
                                 "x" + std::to_string(basis.cols()) + " images");
    }
    out.push_back(set.centered ? s.image : s.image - basis.mean);
  }
  return out;
}

Gallery build_gallery(const SampleSet& train, const BasisPair& basis,
                      const WeightingScheme& scheme) {
  if (train.empty()) fail(ErrorCode::InvalidDataset, "build_gallery: empty training set");
  Gallery g;
  g.basis = basis;
  g.scheme = scheme;
  const auto images = centered_images(train, basis);
  for (std::size_t i = 0; i < images.size(); ++i) {
    g.labels.push_back(train.samples[i].label);
    g.features.push_back(project(images[i], basis, scheme));
  }
  return g;
}

Match classify(const QMatrix& centered_probe, const Gallery& gallery) {
  if (gallery.features.empty()) fail(ErrorCode::InvalidDataset, "classify: empty gallery");
  const QMatrix p = project(centered_probe, gallery.basis, gallery.scheme);
  Match best;
  best.distance = fro_norm(gallery.features[0] - p);
  for (std::size_t j = 1; j < gallery.features.size(); ++j) {
    const double d = fro_norm(gallery.features[j] - p);
    if (d < best.distance) {
      best.distance = d;
      best.index = j;
    }
  }
  best.label = gallery.labels[best.index];
  return best;
}

std::vector<Match> classify_all(const SampleSet& test, const Gallery& gallery) {
  std::vector<Match> out;
  for (const auto& probe : centered_images(test, gallery.basis)) {
    out.push_back(classify(probe, gallery));
  }
  return out;
}

double evaluate(const SampleSet& test, const Gallery& gallery) {
  if (test.empty()) fail(ErrorCode::InvalidDataset, "evaluate: empty test set");
  const auto matches = classify_all(test, gallery);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (matches[i].label == test.samples[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace bqpca
