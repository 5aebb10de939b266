#include "weighting.hpp"

#include <cmath>
#include <map>
#include <string>

#include "error.hpp"
#include "recognition.hpp"

namespace bqpca {

bool weights_left(Manner m) { return m == Manner::WeightedLeft || m == Manner::WeightedBoth; }
bool weights_right(Manner m) { return m == Manner::WeightedRight || m == Manner::WeightedBoth; }

std::string_view to_string(Manner m) {
  switch (m) {
    case Manner::Unweighted: return "unweighted";
    case Manner::WeightedLeft: return "left";
    case Manner::WeightedRight: return "right";
    case Manner::WeightedBoth: return "both";
  }
  return "?";
}

std::string_view to_string(Transform t) {
  return t == Transform::Identity ? "identity" : "inverse_log";
}

std::optional<Manner> parse_manner(std::string_view s) {
  for (Manner m : kAllManners) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Transform> parse_transform(std::string_view s) {
  if (s == "identity") return Transform::Identity;
  if (s == "inverse_log") return Transform::InverseLog;
  return std::nullopt;
}

Eigen::VectorXd transform_weights(std::span<const double> d, Transform t) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (t == Transform::Identity) {
      out[k] = d[i];
      continue;
    }
    if (!(d[i] > 1.0 + 1e-12)) {
      fail(ErrorCode::InvalidWeight,
           "inverse_log weighting needs every objective value > 1, got " + std::to_string(d[i]) +
               " for direction " + std::to_string(i + 1));
    }
    out[k] = 1.0 / std::log(d[i]);
  }
  return out;
}

WeightMatrices build_weights(const BasisPair& basis, Transform t) {
  return {transform_weights(basis.d_left, t), transform_weights(basis.d_right, t)};
}

double joint_weight(const BasisPair& basis, std::size_t k1, std::size_t k2) {
  if (k1 < 1 || k1 > basis.d_left.size() || k2 < 1 || k2 > basis.d_right.size()) {
    fail(ErrorCode::InvalidParameter, "joint_weight: index out of range");
  }
  return basis.d_left[k1 - 1] + basis.d_right[k2 - 1];
}

QMatrix project(const QMatrix& centered, const BasisPair& basis, const WeightingScheme& scheme) {
  if (centered.rows() != basis.rows() || centered.cols() != basis.cols()) {
    fail(ErrorCode::Shape, "project: image is " + std::to_string(centered.rows()) + "x" +
                               std::to_string(centered.cols()) + " but the basis expects " +
                               std::to_string(basis.rows()) + "x" + std::to_string(basis.cols()));
  }
  // (U D)* = D U* for real diagonal D, so weights scale rows and columns.
  QMatrix p = matmul(matmul(conj_transpose(basis.u), centered), basis.v);
  if (weights_left(scheme.manner)) {
    p = scale_rows(p, transform_weights(basis.d_left, scheme.transform));
  }
  if (weights_right(scheme.manner)) {
    p = scale_cols(p, transform_weights(basis.d_right, scheme.transform));
  }
  return p;
}

SelectionResult select_weighting(const SampleSet& train, const FitParams& params,
                                 const SelectionConfig& config) {
  if (config.repeats < 1) fail(ErrorCode::InvalidParameter, "select_weighting: repeats >= 1");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    fail(ErrorCode::InvalidParameter, "select_weighting: train_fraction must be in (0, 1)");
  }
  std::map<std::string, std::size_t> per_class;
  for (const auto& s : train.samples) ++per_class[s.label];
  if (per_class.empty()) fail(ErrorCode::InvalidDataset, "select_weighting: empty training set");
  for (const auto& [label, count] : per_class) {
    if (count < 2) {
      fail(ErrorCode::InvalidDataset, "select_weighting: class '" + label + "' has " +
                                          std::to_string(count) +
                                          " sample(s); at least 2 are needed for validation");
    }
  }

  std::array<double, 4> sum{};
  for (std::size_t r = 0; r < config.repeats; ++r) {
    const Split parts = split(train, {config.train_fraction, 1.0 - config.train_fraction, 0.0},
                              config.seed + r);
    const SampleSet inner = center(parts.train);
    const BasisPair basis = fit(inner.images(), inner.mean, params);
    for (std::size_t i = 0; i < kAllManners.size(); ++i) {
      const Gallery g = build_gallery(inner, basis, {kAllManners[i], config.transform});
      sum[i] += evaluate(parts.validation, g);
    }
  }

  SelectionResult out;
  for (std::size_t i = 0; i < 4; ++i) out.accuracy[i] = sum[i] / static_cast<double>(config.repeats);
  out.scheme.transform = config.transform;
  double best = -1.0;
  for (Manner m : kMannerPrecedence) {
    const double acc = out.accuracy[static_cast<std::size_t>(m)];
    if (acc > best) {
      best = acc;
      out.scheme.manner = m;
    }
  }
  return out;
}

}  // namespace bqpca
