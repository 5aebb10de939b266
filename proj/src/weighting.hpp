#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "dataset.hpp"
#include "quaternion.hpp"
#include "solver.hpp"

namespace bqpca {

enum class Manner { Unweighted, WeightedLeft, WeightedRight, WeightedBoth };
enum class Transform { Identity, InverseLog };

inline constexpr std::array<Manner, 4> kAllManners{Manner::Unweighted, Manner::WeightedLeft,
                                                   Manner::WeightedRight, Manner::WeightedBoth};

/// Tie-breaking precedence used by select_weighting, highest first.
inline constexpr std::array<Manner, 4> kMannerPrecedence{
    Manner::Unweighted, Manner::WeightedRight, Manner::WeightedLeft, Manner::WeightedBoth};

struct WeightingScheme {
  Manner manner = Manner::Unweighted;
  Transform transform = Transform::Identity;
  friend bool operator==(const WeightingScheme&, const WeightingScheme&) = default;
};

bool weights_left(Manner m);
bool weights_right(Manner m);

std::string_view to_string(Manner m);
std::string_view to_string(Transform t);
std::optional<Manner> parse_manner(std::string_view s);
std::optional<Transform> parse_transform(std::string_view s);

/// Diagonals of f(W^left) and f(W^right).
struct WeightMatrices {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
};

/// Identity: the raw per-direction objective values. InverseLog: 1 / ln(d),
/// which requires every d > 1 (InvalidWeight otherwise).
Eigen::VectorXd transform_weights(std::span<const double> d, Transform t);
WeightMatrices build_weights(const BasisPair& basis, Transform t);

/// Joint weighting factor of the pair (u_k1, v_k2), 1-based; diagnostic only.
double joint_weight(const BasisPair& basis, std::size_t k1, std::size_t k2);

/// Feature matrix of a centered image:
///   Unweighted     U* F V
///   WeightedLeft   (U f(Wl))* F V
///   WeightedRight  U* F (V f(Wr))
///   WeightedBoth   (U f(Wl))* F (V f(Wr))
QMatrix project(const QMatrix& centered, const BasisPair& basis, const WeightingScheme& scheme);

struct SelectionConfig {
  std::size_t repeats = 3;
  double train_fraction = 8.0 / 9.0;  // inner-train : validation = 8 : 1
  std::uint64_t seed = 0;
  Transform transform = Transform::Identity;
};

struct SelectionResult {
  WeightingScheme scheme;
  std::array<double, 4> accuracy{};  // mean validation accuracy, kAllManners order
};

/// Repeated stratified inner-train/validation splits of the (uncentered)
/// training set; each repeat fits once and scores all four manners by 1-NN
/// on the same validation part. Returns the manner with the best mean
/// accuracy, ties broken by kMannerPrecedence.
SelectionResult select_weighting(const SampleSet& train, const FitParams& params,
                                 const SelectionConfig& config);

}  // namespace bqpca
