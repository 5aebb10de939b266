#pragma once

#include <span>

#include "dataset.hpp"
#include "solver.hpp"
#include "weighting.hpp"

namespace bqpca {

/// U f(Wl)^-1 P f(Wr)^-1 V* + mean, inverting only the sides the scheme
/// weighted. Throws InvalidWeight on a zero weight of a weighted side.
QMatrix reconstruct(const QMatrix& features, const BasisPair& basis,
                    const WeightingScheme& scheme);

/// Projects and reconstructs every image of an uncentered set; labels and
/// file names are kept.
SampleSet reconstruct_set(const SampleSet& set, const BasisPair& basis,
                          const WeightingScheme& scheme);

/// Mean over samples of 1 - ||F_i - F_i^rec||_F / ||F_i||_F, on uncentered
/// images.
double reconstruction_ratio(std::span<const QMatrix> originals, std::span<const QMatrix> recs);

}  // namespace bqpca
