#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "solver.hpp"
#include "weighting.hpp"

namespace bqpca {

struct Gallery {
  std::vector<std::string> labels;
  std::vector<QMatrix> features;  // k1 x k2 each
  BasisPair basis;
  WeightingScheme scheme;

  std::size_t size() const { return features.size(); }
};

/// Images of an uncentered set are centered by the basis mean first; a set
/// flagged as centered is used as is.
std::vector<QMatrix> centered_images(const SampleSet& set, const BasisPair& basis);

Gallery build_gallery(const SampleSet& train, const BasisPair& basis,
                      const WeightingScheme& scheme);

struct Match {
  std::string label;
  double distance = 0.0;
  std::size_t index = 0;  // gallery position
};

/// Nearest gallery entry to the projection of a centered probe under the
/// quaternion Frobenius distance; the first index wins ties.
Match classify(const QMatrix& centered_probe, const Gallery& gallery);

/// Fraction of test samples whose nearest gallery label matches their own.
double evaluate(const SampleSet& test, const Gallery& gallery);

/// Predicted label per test sample.
std::vector<Match> classify_all(const SampleSet& test, const Gallery& gallery);

}  // namespace bqpca
