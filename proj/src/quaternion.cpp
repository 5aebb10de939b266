#include "quaternion.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace bqpca {

namespace {

void require_same_size(const QVector& a, const QVector& b, const char* op) {
  if (a.size() != b.size()) {
    fail(ErrorCode::Shape, std::string(op) + ": vector lengths " +
                               std::to_string(a.size()) + " and " +
                               std::to_string(b.size()) + " differ");
  }
}

void require_same_dims(const QMatrix& a, const QMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::Shape, std::string(op) + ": matrix dims " +
                               std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                               " and " + std::to_string(b.rows()) + "x" +
                               std::to_string(b.cols()) + " differ");
  }
}

// v <- v - u (u* v), in place.
void subtract_projection(QVector& v, const QVector& u) {
  const Quaternion c = inner(u, v);
  v -= u.times_right(c);
}

}  // namespace

// ---------------------------------------------------------------- QVector

QVector::QVector(std::size_t n) {
  for (auto& p : parts_) p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
}

QVector QVector::unit(std::size_t n, std::size_t i) {
  QVector v(n);
  v.parts_[0][static_cast<Eigen::Index>(i)] = 1.0;
  return v;
}

QVector QVector::constant(std::size_t n, const Quaternion& q) {
  QVector v(n);
  v.parts_[0].setConstant(q.w0);
  v.parts_[1].setConstant(q.w1);
  v.parts_[2].setConstant(q.w2);
  v.parts_[3].setConstant(q.w3);
  return v;
}

Quaternion QVector::operator[](std::size_t i) const {
  const auto k = static_cast<Eigen::Index>(i);
  return {parts_[0][k], parts_[1][k], parts_[2][k], parts_[3][k]};
}

void QVector::set(std::size_t i, const Quaternion& q) {
  const auto k = static_cast<Eigen::Index>(i);
  parts_[0][k] = q.w0;
  parts_[1][k] = q.w1;
  parts_[2][k] = q.w2;
  parts_[3][k] = q.w3;
}

QVector& QVector::operator+=(const QVector& o) {
  require_same_size(*this, o, "vector add");
  for (int c = 0; c < 4; ++c) parts_[c] += o.parts_[c];
  return *this;
}

QVector& QVector::operator-=(const QVector& o) {
  require_same_size(*this, o, "vector subtract");
  for (int c = 0; c < 4; ++c) parts_[c] -= o.parts_[c];
  return *this;
}

QVector& QVector::operator*=(double s) {
  for (auto& p : parts_) p *= s;
  return *this;
}

QVector QVector::times_right(const Quaternion& q) const {
  const auto& a0 = parts_[0];
  const auto& a1 = parts_[1];
  const auto& a2 = parts_[2];
  const auto& a3 = parts_[3];
  QVector r;
  r.parts_[0] = a0 * q.w0 - a1 * q.w1 - a2 * q.w2 - a3 * q.w3;
  r.parts_[1] = a0 * q.w1 + a1 * q.w0 + a2 * q.w3 - a3 * q.w2;
  r.parts_[2] = a0 * q.w2 - a1 * q.w3 + a2 * q.w0 + a3 * q.w1;
  r.parts_[3] = a0 * q.w3 + a1 * q.w2 - a2 * q.w1 + a3 * q.w0;
  return r;
}

QVector operator+(QVector a, const QVector& b) { return a += b; }
QVector operator-(QVector a, const QVector& b) { return a -= b; }
QVector operator*(double s, QVector a) { return a *= s; }

Quaternion inner(const QVector& u, const QVector& v) {
  require_same_size(u, v, "inner");
  // conj(u_i) v_i summed.
  const auto& u0 = u.part(0);
  const auto& u1 = u.part(1);
  const auto& u2 = u.part(2);
  const auto& u3 = u.part(3);
  const auto& v0 = v.part(0);
  const auto& v1 = v.part(1);
  const auto& v2 = v.part(2);
  const auto& v3 = v.part(3);
  return {u0.dot(v0) + u1.dot(v1) + u2.dot(v2) + u3.dot(v3),
          u0.dot(v1) - u1.dot(v0) - u2.dot(v3) + u3.dot(v2),
          u0.dot(v2) + u1.dot(v3) - u2.dot(v0) - u3.dot(v1),
          u0.dot(v3) - u1.dot(v2) + u2.dot(v1) - u3.dot(v0)};
}

Eigen::VectorXd vabs(const QVector& w) {
  Eigen::VectorXd sq = w.part(0).cwiseAbs2();
  for (int c = 1; c < 4; ++c) sq += w.part(c).cwiseAbs2();
  return sq.cwiseSqrt();
}

QVector vsign(const QVector& w) {
  const Eigen::VectorXd r = vabs(w);
  // Zero moduli map to zero entries.
  const Eigen::VectorXd inv = r.unaryExpr([](double x) { return x == 0.0 ? 0.0 : 1.0 / x; });
  return real_scale(inv, w);
}

double lp_norm(const QVector& w, double p) {
  if (!(p > 0.0)) {
    fail(ErrorCode::InvalidParameter, "lp_norm: p must be positive, got " + std::to_string(p));
  }
  const Eigen::VectorXd r = vabs(w);
  if (r.size() == 0) return 0.0;
  if (p == kInfinity) return r.maxCoeff();
  if (p == 2.0) return r.norm();
  if (p == 1.0) return r.sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += std::pow(r[i], p);
  return std::pow(acc, 1.0 / p);
}

QVector real_scale(const Eigen::VectorXd& w, const QVector& v) {
  if (static_cast<std::size_t>(w.size()) != v.size()) {
    fail(ErrorCode::Shape, "real_scale: weight length " + std::to_string(w.size()) +
                               " does not match vector length " + std::to_string(v.size()));
  }
  QVector r(v.size());
  for (int c = 0; c < 4; ++c) r.part(c) = w.cwiseProduct(v.part(c));
  return r;
}

// ---------------------------------------------------------------- QMatrix

QMatrix::QMatrix(std::size_t rows, std::size_t cols) {
  for (auto& p : parts_) {
    p = Plane::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  }
}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  m.parts_[0].setIdentity();
  return m;
}

QMatrix QMatrix::from_columns(std::span<const QVector> columns, std::size_t rows) {
  QMatrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) m.set_col(j, columns[j]);
  return m;
}

Quaternion QMatrix::operator()(std::size_t i, std::size_t j) const {
  const auto r = static_cast<Eigen::Index>(i);
  const auto c = static_cast<Eigen::Index>(j);
  return {parts_[0](r, c), parts_[1](r, c), parts_[2](r, c), parts_[3](r, c)};
}

void QMatrix::set(std::size_t i, std::size_t j, const Quaternion& q) {
  const auto r = static_cast<Eigen::Index>(i);
  const auto c = static_cast<Eigen::Index>(j);
  parts_[0](r, c) = q.w0;
  parts_[1](r, c) = q.w1;
  parts_[2](r, c) = q.w2;
  parts_[3](r, c) = q.w3;
}

QVector QMatrix::col(std::size_t j) const {
  QVector v(rows());
  for (int c = 0; c < 4; ++c) v.part(c) = parts_[c].col(static_cast<Eigen::Index>(j));
  return v;
}

void QMatrix::set_col(std::size_t j, const QVector& v) {
  if (v.size() != rows()) {
    fail(ErrorCode::Shape, "set_col: column length " + std::to_string(v.size()) +
                               " does not match " + std::to_string(rows()) + " rows");
  }
  for (int c = 0; c < 4; ++c) parts_[c].col(static_cast<Eigen::Index>(j)) = v.part(c);
}

QMatrix QMatrix::left_cols(std::size_t count) const {
  if (count > cols()) {
    fail(ErrorCode::Shape, "left_cols: requested " + std::to_string(count) + " of " +
                               std::to_string(cols()) + " columns");
  }
  QMatrix m;
  for (int c = 0; c < 4; ++c) m.parts_[c] = parts_[c].leftCols(static_cast<Eigen::Index>(count));
  return m;
}

QMatrix& QMatrix::operator+=(const QMatrix& o) {
  require_same_dims(*this, o, "matrix add");
  for (int c = 0; c < 4; ++c) parts_[c] += o.parts_[c];
  return *this;
}

QMatrix& QMatrix::operator-=(const QMatrix& o) {
  require_same_dims(*this, o, "matrix subtract");
  for (int c = 0; c < 4; ++c) parts_[c] -= o.parts_[c];
  return *this;
}

QMatrix& QMatrix::operator*=(double s) {
  for (auto& p : parts_) p *= s;
  return *this;
}

QMatrix operator+(QMatrix a, const QMatrix& b) { return a += b; }
QMatrix operator-(QMatrix a, const QMatrix& b) { return a -= b; }
QMatrix operator*(double s, QMatrix a) { return a *= s; }

QMatrix conj_transpose(const QMatrix& a) {
  QMatrix r(a.cols(), a.rows());
  r.part(0) = a.part(0).transpose();
  for (int c = 1; c < 4; ++c) r.part(c) = -a.part(c).transpose();
  return r;
}

QMatrix matmul(const QMatrix& a, const QMatrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorCode::Shape, "matmul: " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                               "x" + std::to_string(b.cols()));
  }
  const auto& a0 = a.part(0);
  const auto& a1 = a.part(1);
  const auto& a2 = a.part(2);
  const auto& a3 = a.part(3);
  const auto& b0 = b.part(0);
  const auto& b1 = b.part(1);
  const auto& b2 = b.part(2);
  const auto& b3 = b.part(3);
  QMatrix r(a.rows(), b.cols());
  r.part(0).noalias() = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3;
  r.part(1).noalias() = a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2;
  r.part(2).noalias() = a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1;
  r.part(3).noalias() = a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0;
  return r;
}

QVector matvec(const QMatrix& a, const QVector& w) {
  if (a.cols() != w.size()) {
    fail(ErrorCode::Shape, "matvec: " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()) + " times vector of length " +
                               std::to_string(w.size()));
  }
  const auto& a0 = a.part(0);
  const auto& a1 = a.part(1);
  const auto& a2 = a.part(2);
  const auto& a3 = a.part(3);
  const auto& w0 = w.part(0);
  const auto& w1 = w.part(1);
  const auto& w2 = w.part(2);
  const auto& w3 = w.part(3);
  QVector r(a.rows());
  r.part(0).noalias() = a0 * w0 - a1 * w1 - a2 * w2 - a3 * w3;
  r.part(1).noalias() = a0 * w1 + a1 * w0 + a2 * w3 - a3 * w2;
  r.part(2).noalias() = a0 * w2 - a1 * w3 + a2 * w0 + a3 * w1;
  r.part(3).noalias() = a0 * w3 + a1 * w2 - a2 * w1 + a3 * w0;
  return r;
}

QMatrix scale_rows(const QMatrix& a, const Eigen::VectorXd& d) {
  if (static_cast<std::size_t>(d.size()) != a.rows()) {
    fail(ErrorCode::Shape, "scale_rows: " + std::to_string(d.size()) + " weights for " +
                               std::to_string(a.rows()) + " rows");
  }
  QMatrix r = a;
  for (int c = 0; c < 4; ++c) r.part(c) = d.asDiagonal() * a.part(c);
  return r;
}

QMatrix scale_cols(const QMatrix& a, const Eigen::VectorXd& d) {
  if (static_cast<std::size_t>(d.size()) != a.cols()) {
    fail(ErrorCode::Shape, "scale_cols: " + std::to_string(d.size()) + " weights for " +
                               std::to_string(a.cols()) + " columns");
  }
  QMatrix r = a;
  for (int c = 0; c < 4; ++c) r.part(c) = a.part(c) * d.asDiagonal();
  return r;
}

double fro_norm(const QMatrix& a) {
  double acc = 0.0;
  for (int c = 0; c < 4; ++c) acc += a.part(c).squaredNorm();
  return std::sqrt(acc);
}

Eigen::MatrixXd real_repr(const QMatrix& f) {
  const auto m = static_cast<Eigen::Index>(f.rows());
  const auto n = static_cast<Eigen::Index>(f.cols());
  const auto& f0 = f.part(0);
  const auto& f1 = f.part(1);
  const auto& f2 = f.part(2);
  const auto& f3 = f.part(3);
  Eigen::MatrixXd r(4 * m, 4 * n);
  r.block(0, 0, m, n) = f0;
  r.block(0, n, m, n) = -f1;
  r.block(0, 2 * n, m, n) = -f2;
  r.block(0, 3 * n, m, n) = -f3;
  r.block(m, 0, m, n) = f1;
  r.block(m, n, m, n) = f0;
  r.block(m, 2 * n, m, n) = -f3;
  r.block(m, 3 * n, m, n) = f2;
  r.block(2 * m, 0, m, n) = f2;
  r.block(2 * m, n, m, n) = f3;
  r.block(2 * m, 2 * n, m, n) = f0;
  r.block(2 * m, 3 * n, m, n) = -f1;
  r.block(3 * m, 0, m, n) = f3;
  r.block(3 * m, n, m, n) = -f2;
  r.block(3 * m, 2 * n, m, n) = f1;
  r.block(3 * m, 3 * n, m, n) = f0;
  return r;
}

Eigen::VectorXd real_repr_vec(const QVector& w) {
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::VectorXd y(4 * n);
  for (int c = 0; c < 4; ++c) y.segment(c * n, n) = w.part(c);
  return y;
}

QVector from_real_vec(const Eigen::VectorXd& y) {
  if (y.size() % 4 != 0) {
    fail(ErrorCode::Shape,
         "from_real_vec: length " + std::to_string(y.size()) + " is not divisible by 4");
  }
  const Eigen::Index n = y.size() / 4;
  QVector w(static_cast<std::size_t>(n));
  for (int c = 0; c < 4; ++c) w.part(c) = y.segment(c * n, n);
  return w;
}

// ------------------------------------------------------ orthogonalization

namespace {

// Two MGS sweeps; nullopt when the first-sweep residual is below
// tol * ||vnew||_2.
std::optional<QVector> try_orthonormalize(const QVector& vnew, std::span<const QVector> basis,
                                          double tol) {
  const double scale = lp_norm(vnew, 2.0);
  if (scale == 0.0) return std::nullopt;
  QVector v = vnew;
  for (const auto& u : basis) {
    require_same_size(u, v, "mgs_orthonormalize");
    subtract_projection(v, u);
  }
  const double residual = lp_norm(v, 2.0);
  if (!(residual > tol * scale)) return std::nullopt;
  for (const auto& u : basis) subtract_projection(v, u);
  v *= 1.0 / lp_norm(v, 2.0);
  return v;
}

// Right-multiplies v by a unit quaternion so that the first entry whose
// modulus exceeds 1e-8 of the largest becomes real and positive.
void fix_phase(QVector& v) {
  const Eigen::VectorXd r = vabs(v);
  if (r.size() == 0) return;
  const double cutoff = 1e-8 * r.maxCoeff();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (r[static_cast<Eigen::Index>(i)] > cutoff) {
      v = v.times_right(qsign(v[i]).conj());
      return;
    }
  }
}

}  // namespace

QVector mgs_orthonormalize(const QVector& vnew, std::span<const QVector> basis, double tol) {
  auto v = try_orthonormalize(vnew, basis, tol);
  if (!v) {
    fail(ErrorCode::DegenerateDirection,
         "mgs_orthonormalize: new vector lies in the span of the " +
             std::to_string(basis.size()) + " basis vectors");
  }
  return *std::move(v);
}

// -------------------------------------------------------- eigen-solver

std::vector<EigenPair> hermitian_topk_eig(const QMatrix& g, std::size_t k,
                                          double hermitian_tol) {
  const std::size_t n = g.rows();
  if (g.cols() != n) {
    fail(ErrorCode::Shape, "hermitian_topk_eig: matrix is " + std::to_string(g.rows()) + "x" +
                               std::to_string(g.cols()));
  }
  if (k < 1 || k > n) {
    fail(ErrorCode::InvalidParameter, "hermitian_topk_eig: k = " + std::to_string(k) +
                                          " outside [1, " + std::to_string(n) + "]");
  }
  const double scale = fro_norm(g);
  if (fro_norm(g - conj_transpose(g)) > hermitian_tol * scale) {
    fail(ErrorCode::InvalidParameter, "hermitian_topk_eig: matrix is not Hermitian");
  }

  Eigen::MatrixXd r = real_repr(g);
  r = 0.5 * (r + r.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::InvalidParameter, "hermitian_topk_eig: eigendecomposition failed");
  }

  // The real spectrum repeats every quaternion eigenvalue four times, and the
  // four real eigenvectors of a group span {v q}. Walking the real
  // eigenvectors from the top and keeping those that survive Gram-Schmidt
  // against the accepted set yields one quaternion eigenvector per group,
  // including repeated quaternion eigenvalues.
  std::vector<EigenPair> out;
  std::vector<QVector> accepted;
  for (Eigen::Index idx = es.eigenvalues().size() - 1; idx >= 0 && out.size() < k; --idx) {
    const QVector candidate = from_real_vec(es.eigenvectors().col(idx));
    auto v = try_orthonormalize(candidate, accepted, 1e-6);
    if (!v) continue;
    fix_phase(*v);
    const double rayleigh = inner(*v, matvec(g, *v)).w0;
    accepted.push_back(*v);
    out.push_back({rayleigh, *std::move(v)});
  }
  return out;
}

}  // namespace bqpca
