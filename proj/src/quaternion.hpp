#pragma once

// Dense quaternion scalars, vectors and matrices.
//
// Vectors and matrices keep their four real components in separate planes
// (structure of arrays): a = a0 + a1 i + a2 j + a3 k is stored as part(0..3).
// Every product reduces to real plane arithmetic, and the real block
// representation below mirrors the quaternion algebra exactly.
//
// Vectors are columns of a right module: scalars act on the right, and the
// inner product conjugates its left argument, <u, v> = u* v.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bqpca {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Library tolerances. Each can be overridden per call where it is used.
inline constexpr double kOrthogonalityTol = 1e-10;
inline constexpr double kEquivalenceTol = 1e-12;
inline constexpr double kDegenerateTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;

struct Quaternion {
  double w0 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 0.0;

  constexpr Quaternion conj() const { return {w0, -w1, -w2, -w3}; }
  constexpr bool is_zero() const {
    return w0 == 0.0 && w1 == 0.0 && w2 == 0.0 && w3 == 0.0;
  }
  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Hamilton product; i^2 = j^2 = k^2 = ijk = -1.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w0 * b.w0 - a.w1 * b.w1 - a.w2 * b.w2 - a.w3 * b.w3,
          a.w0 * b.w1 + a.w1 * b.w0 + a.w2 * b.w3 - a.w3 * b.w2,
          a.w0 * b.w2 - a.w1 * b.w3 + a.w2 * b.w0 + a.w3 * b.w1,
          a.w0 * b.w3 + a.w1 * b.w2 - a.w2 * b.w1 + a.w3 * b.w0};
}
constexpr Quaternion operator*(double s, const Quaternion& a) {
  return {s * a.w0, s * a.w1, s * a.w2, s * a.w3};
}
constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.w0 + b.w0, a.w1 + b.w1, a.w2 + b.w2, a.w3 + b.w3};
}
constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) {
  return {a.w0 - b.w0, a.w1 - b.w1, a.w2 - b.w2, a.w3 - b.w3};
}

inline Quaternion qmul(const Quaternion& a, const Quaternion& b) { return a * b; }

/// Modulus |a|.
inline double qabs(const Quaternion& a) {
  return std::sqrt(a.w0 * a.w0 + a.w1 * a.w1 + a.w2 * a.w2 + a.w3 * a.w3);
}

/// a / |a|, and exactly zero for a = 0.
inline Quaternion qsign(const Quaternion& a) {
  const double r = qabs(a);
  if (r == 0.0) return {};
  return {a.w0 / r, a.w1 / r, a.w2 / r, a.w3 / r};
}

using Plane = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class QVector {
 public:
  QVector() = default;
  explicit QVector(std::size_t n);

  static QVector unit(std::size_t n, std::size_t i);
  static QVector constant(std::size_t n, const Quaternion& q);

  std::size_t size() const { return static_cast<std::size_t>(parts_[0].size()); }

  Quaternion operator[](std::size_t i) const;
  void set(std::size_t i, const Quaternion& q);

  Eigen::VectorXd& part(int c) { return parts_[c]; }
  const Eigen::VectorXd& part(int c) const { return parts_[c]; }

  QVector& operator+=(const QVector& o);
  QVector& operator-=(const QVector& o);
  QVector& operator*=(double s);

  /// v <- v q (right scalar multiplication).
  QVector times_right(const Quaternion& q) const;

 private:
  std::array<Eigen::VectorXd, 4> parts_;
};

QVector operator+(QVector a, const QVector& b);
QVector operator-(QVector a, const QVector& b);
QVector operator*(double s, QVector a);

/// Quaternion inner product u* v.
Quaternion inner(const QVector& u, const QVector& v);

/// Element-wise moduli.
Eigen::VectorXd vabs(const QVector& w);
/// Element-wise qsign.
QVector vsign(const QVector& w);

/// (sum |w_i|^p)^(1/p); p = kInfinity gives max |w_i|. p must be positive.
double lp_norm(const QVector& w, double p);

/// Hadamard scaling of all four planes of v by the real vector w.
QVector real_scale(const Eigen::VectorXd& w, const QVector& v);

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols);

  static QMatrix identity(std::size_t n);
  static QMatrix from_columns(std::span<const QVector> columns, std::size_t rows);

  std::size_t rows() const { return static_cast<std::size_t>(parts_[0].rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(parts_[0].cols()); }

  Quaternion operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Quaternion& q);

  Plane& part(int c) { return parts_[c]; }
  const Plane& part(int c) const { return parts_[c]; }

  QVector col(std::size_t j) const;
  void set_col(std::size_t j, const QVector& v);
  /// First `count` columns.
  QMatrix left_cols(std::size_t count) const;

  /// Real plane identically zero.
  bool is_pure() const { return parts_[0].isZero(0.0); }

  QMatrix& operator+=(const QMatrix& o);
  QMatrix& operator-=(const QMatrix& o);
  QMatrix& operator*=(double s);

 private:
  std::array<Plane, 4> parts_;
};

QMatrix operator+(QMatrix a, const QMatrix& b);
QMatrix operator-(QMatrix a, const QMatrix& b);
QMatrix operator*(double s, QMatrix a);

QMatrix conj_transpose(const QMatrix& a);
QMatrix matmul(const QMatrix& a, const QMatrix& b);
QVector matvec(const QMatrix& a, const QVector& w);

/// Diag(d) * A and A * Diag(d) for real d.
QMatrix scale_rows(const QMatrix& a, const Eigen::VectorXd& d);
QMatrix scale_cols(const QMatrix& a, const Eigen::VectorXd& d);

/// sqrt of the summed squared entry moduli.
double fro_norm(const QMatrix& a);

/// 4m x 4n real block representation:
///   [ F0 -F1 -F2 -F3 ]
///   [ F1  F0 -F3  F2 ]
///   [ F2  F3  F0 -F1 ]
///   [ F3 -F2  F1  F0 ]
Eigen::MatrixXd real_repr(const QMatrix& f);
/// Stacked component vector [w0; w1; w2; w3] of length 4n.
Eigen::VectorXd real_repr_vec(const QVector& w);
/// Inverse of real_repr_vec; the length must be divisible by 4.
QVector from_real_vec(const Eigen::VectorXd& y);

/// Modified Gram-Schmidt of vnew against an orthonormal basis, with
/// right-scalar updates v <- v - u (u* v), followed by 2-norm normalization.
/// Throws DegenerateDirection when the residual falls below tol * ||vnew||_2.
QVector mgs_orthonormalize(const QVector& vnew, std::span<const QVector> basis,
                           double tol = kDegenerateTol);

struct EigenPair {
  double value = 0.0;
  QVector vector;
};

/// Top-k right eigenpairs of a Hermitian quaternion matrix, eigenvalues
/// descending. Each eigenvector has unit 2-norm and its first significant
/// entry is real and positive.
std::vector<EigenPair> hermitian_topk_eig(const QMatrix& g, std::size_t k,
                                          double hermitian_tol = kHermitianTol);

}  // namespace bqpca
