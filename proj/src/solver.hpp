#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quaternion.hpp"

namespace bqpca {

enum class Side { Left, Right };

enum class InitKind {
  Ones,    // all-ones real vector scaled to unit p-norm
  Random,  // seeded uniform quaternion entries scaled to unit p-norm
};

/// Modulus factor used by the 0 < p < 1 update.
enum class SmallPWeight {
  Initial,  // |w^0|, as published
  Current,  // |w^k|
};

struct FitParams {
  double s = 2.0;
  double p = 2.0;  // kInfinity allowed
  std::size_t k1 = 1;
  std::size_t k2 = 1;
  double tol = 1e-4;
  std::size_t max_iter = 500;
  InitKind init = InitKind::Ones;
  std::uint64_t seed = 0;
  SmallPWeight small_p_weight = SmallPWeight::Initial;
};

/// Human-readable violations of the parameter constraints for m x n samples;
/// empty when valid. Pass rows = cols = 0 to skip the k bounds.
std::vector<std::string> validate(const FitParams& params, std::size_t rows, std::size_t cols);

/// Sum of ||F_i w||_s^s (right) or ||w* F_i||_s^s (left).
double objective(std::span<const QMatrix> samples, const QVector& w, Side side, double s);

/// y = sum_i F_i* (|F_i w|^(s-1) (.) sign(F_i w)). A zero modulus contributes
/// zero for every s, including s = 1.
QVector mm_linearization(std::span<const QMatrix> samples, const QVector& w, double s);

/// The constrained maximizer of Re(y* w') for each p regime:
///   0 < p < 1:  y <- |w0| (.) |w|^(1-p) (.) y, then y / ||y||_p
///   p = 1:      qsign(y_j) at the first index of largest modulus
///   1 < p < inf: |y|^(q-1) (.) sign(y) / ||.||_p, q = p / (p - 1)
///   p = inf:    vsign(y)
/// Throws DegenerateDirection when the (reweighted) y is zero.
QVector mm_maximize_linear(const QVector& y, const QVector& w, const QVector& w0, double p,
                           SmallPWeight weight = SmallPWeight::Initial);

/// One minorization-maximization step for the right-side problem.
QVector mm_update(std::span<const QMatrix> samples, const QVector& w, double s, double p,
                  const QVector& w0, SmallPWeight weight = SmallPWeight::Initial);

/// Starting vector of unit p-norm for n-dimensional directions.
QVector initial_vector(std::size_t n, const FitParams& params);

struct DirectionResult {
  QVector vector;      // orthonormalized projector
  double objective = 0.0;  // objective of `vector` on the deflated samples
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;   // f^0, f^1, ... of the MM loop
  std::vector<double> constraint_trace;  // ||w^k||_p of each iterate
};

/// Runs the MM loop for one right projector on the samples deflated against
/// `orthogonal_to`, then orthonormalizes the result against it.
DirectionResult solve_direction(std::span<const QMatrix> samples, const FitParams& params,
                                std::span<const QVector> orthogonal_to = {});

struct DirectionInfo {
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct BasisPair {
  QMatrix u;  // m x k1, orthonormal columns
  QMatrix v;  // n x k2, orthonormal columns
  std::vector<double> d_left;
  std::vector<double> d_right;
  FitParams params;
  QMatrix mean;  // training mean, m x n

  // Fit diagnostics; empty for a basis read from disk.
  std::vector<DirectionInfo> left_info;
  std::vector<DirectionInfo> right_info;
  std::vector<std::string> warnings;

  std::size_t rows() const { return u.rows(); }
  std::size_t cols() const { return v.rows(); }
  std::size_t k1() const { return u.cols(); }
  std::size_t k2() const { return v.cols(); }
};

/// Fits k2 right and k1 left projectors on mean-centered samples, each side
/// by sequential deflation. A DegenerateDirection error carries the 1-based
/// index of the direction at which the sample space ran out.
BasisPair fit(std::span<const QMatrix> centered, const QMatrix& mean, const FitParams& params);

/// Keeps the leading k1 left and k2 right projectors. Sequential deflation
/// makes this equal to a fit with the smaller counts.
BasisPair truncate(const BasisPair& basis, std::size_t k1, std::size_t k2);

/// F_i (I - Q Q*) for orthonormal columns Q.
std::vector<QMatrix> deflate_right(std::span<const QMatrix> samples, const QMatrix& q);
/// (I - Q Q*) F_i for orthonormal columns Q.
std::vector<QMatrix> deflate_left(std::span<const QMatrix> samples, const QMatrix& q);

struct CovarianceResult {
  std::vector<double> eigenvalues;
  QMatrix w;  // n x k
};

/// Top-k eigenpairs of the image covariance (1/l) sum F_i* F_i.
CovarianceResult covariance_baseline(std::span<const QMatrix> centered, std::size_t k);

}  // namespace bqpca
