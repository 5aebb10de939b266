#include "solver.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "error.hpp"

namespace bqpca {

namespace {

constexpr double kDeltaGuard = 1e-300;
// Residual sample energy, relative to the undeflated samples, below which
// the remaining subspace is treated as exhausted.
constexpr double kExhaustedTol = 1e-12;

std::string fmt_double(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void require_conformant(std::span<const QMatrix> samples, const char* op) {
  if (samples.empty()) fail(ErrorCode::InvalidDataset, std::string(op) + ": no samples");
  for (const auto& f : samples) {
    if (f.rows() != samples[0].rows() || f.cols() != samples[0].cols()) {
      fail(ErrorCode::Shape, std::string(op) + ": samples do not share dimensions");
    }
  }
}

double total_energy(std::span<const QMatrix> samples) {
  double acc = 0.0;
  for (const auto& f : samples) {
    const double r = fro_norm(f);
    acc += r * r;
  }
  return std::sqrt(acc);
}

double s_power_sum(const QVector& z, double s) {
  const Eigen::VectorXd r = vabs(z);
  if (s == 2.0) return r.squaredNorm();
  if (s == 1.0) return r.sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += std::pow(r[i], s);
  return acc;
}

void require_params(const FitParams& params, std::size_t rows, std::size_t cols) {
  const auto problems = validate(params, rows, cols);
  if (problems.empty()) return;
  std::string msg = "invalid fit parameters:";
  for (const auto& p : problems) msg += " " + p + ";";
  fail(ErrorCode::InvalidParameter, msg);
}

// MM loop on samples that are already deflated against `orthogonal_to`.
DirectionResult solve_deflated(std::span<const QMatrix> work, const FitParams& params,
                               std::span<const QVector> orthogonal_to) {
  const std::size_t n = work[0].cols();
  if (total_energy(work) == 0.0) {
    fail(ErrorCode::DegenerateDirection, "solve_direction: all samples are zero");
  }

  QVector w0 = initial_vector(n, params);
  double f = objective(work, w0, Side::Right, params.s);
  if (f == 0.0 && params.init == InitKind::Ones) {
    // The all-ones start lies in the common null space; fall back to a
    // seeded random start.
    FitParams alt = params;
    alt.init = InitKind::Random;
    w0 = initial_vector(n, alt);
    f = objective(work, w0, Side::Right, params.s);
  }

  DirectionResult result;
  result.objective_trace.push_back(f);
  result.constraint_trace.push_back(lp_norm(w0, params.p));

  QVector w = w0;
  while (result.iterations < params.max_iter) {
    QVector next = mm_update(work, w, params.s, params.p, w0, params.small_p_weight);
    const double f_next = objective(work, next, Side::Right, params.s);
    const double delta = std::abs(f_next - f) / (std::abs(f) + kDeltaGuard);
    w = std::move(next);
    f = f_next;
    ++result.iterations;
    result.objective_trace.push_back(f);
    result.constraint_trace.push_back(lp_norm(w, params.p));
    if (delta <= params.tol) {
      result.converged = true;
      break;
    }
  }

  result.vector = mgs_orthonormalize(w, orthogonal_to);
  result.objective = objective(work, result.vector, Side::Right, params.s);
  return result;
}

struct SidePass {
  std::vector<QVector> directions;
  std::vector<double> values;
  std::vector<DirectionInfo> info;
};

// Sequential right-side extraction of k directions with re-deflation of the
// original samples after each one.
SidePass run_side(std::span<const QMatrix> samples, const FitParams& params, std::size_t k,
                  const char* side_name, std::vector<std::string>& warnings) {
  SidePass pass;
  const std::size_t n = samples[0].cols();
  const double energy = total_energy(samples);
  std::vector<QMatrix> work(samples.begin(), samples.end());
  for (std::size_t t = 1; t <= k; ++t) {
    if (!(total_energy(work) > kExhaustedTol * energy)) {
      Error e(ErrorCode::DegenerateDirection,
              std::string("fit: ") + side_name + " sample space exhausted at direction " +
                  std::to_string(t));
      e.direction_index = t;
      throw e;
    }
    DirectionResult r;
    try {
      r = solve_deflated(work, params, pass.directions);
    } catch (Error& e) {
      if (e.code() != ErrorCode::DegenerateDirection) throw;
      Error tagged(ErrorCode::DegenerateDirection, std::string("fit: ") + side_name +
                                                       " direction " + std::to_string(t) +
                                                       ": " + e.what());
      tagged.direction_index = t;
      throw tagged;
    }
    if (!r.converged) {
      warnings.push_back(std::string(side_name) + " direction " + std::to_string(t) +
                         " hit max_iter = " + std::to_string(params.max_iter) +
                         " before reaching tol");
    }
    pass.directions.push_back(r.vector);
    pass.values.push_back(r.objective);
    pass.info.push_back({r.objective, r.iterations, r.converged});
    work = deflate_right(samples, QMatrix::from_columns(pass.directions, n));
  }
  return pass;
}

}  // namespace

std::vector<std::string> validate(const FitParams& params, std::size_t rows, std::size_t cols) {
  std::vector<std::string> out;
  if (!(params.s >= 1.0) || !std::isfinite(params.s)) {
    out.push_back("s >= 1 (finite) required, got " + fmt_double(params.s));
  }
  if (!(params.p > 0.0)) out.push_back("p > 0 required, got " + fmt_double(params.p));
  if (params.k1 < 1) out.push_back("k1 >= 1 required");
  if (params.k2 < 1) out.push_back("k2 >= 1 required");
  if (rows > 0 && params.k1 > rows) {
    out.push_back("k1 <= m = " + std::to_string(rows) + " required, got " +
                  std::to_string(params.k1));
  }
  if (cols > 0 && params.k2 > cols) {
    out.push_back("k2 <= n = " + std::to_string(cols) + " required, got " +
                  std::to_string(params.k2));
  }
  if (!(params.tol >= 0.0)) out.push_back("tol >= 0 required, got " + fmt_double(params.tol));
  if (params.max_iter < 1) out.push_back("max_iter >= 1 required");
  return out;
}

double objective(std::span<const QMatrix> samples, const QVector& w, Side side, double s) {
  double acc = 0.0;
  for (const auto& f : samples) {
    const std::size_t expected = side == Side::Right ? f.cols() : f.rows();
    if (w.size() != expected) {
      fail(ErrorCode::Shape, "objective: direction of length " + std::to_string(w.size()) +
                                 " for " + std::to_string(f.rows()) + "x" +
                                 std::to_string(f.cols()) + " sample on the " +
                                 (side == Side::Right ? "right" : "left"));
    }
    // |w* F| entries equal |F* w| entries.
    const QVector z = side == Side::Right ? matvec(f, w) : matvec(conj_transpose(f), w);
    acc += s_power_sum(z, s);
  }
  return acc;
}

QVector mm_linearization(std::span<const QMatrix> samples, const QVector& w, double s) {
  require_conformant(samples, "mm_linearization");
  QVector y(samples[0].cols());
  for (const auto& f : samples) {
    const QVector z = matvec(f, w);
    const Eigen::VectorXd r = vabs(z);
    // |z|^(s-1) (.) sign(z) = |z|^(s-2) (.) z, with 0 where z_i = 0.
    const Eigen::VectorXd scale = r.unaryExpr([s](double x) {
      if (x == 0.0) return 0.0;
      return s == 2.0 ? 1.0 : std::pow(x, s - 2.0);
    });
    y += matvec(conj_transpose(f), real_scale(scale, z));
  }
  return y;
}

QVector mm_maximize_linear(const QVector& y, const QVector& w, const QVector& w0, double p,
                           SmallPWeight weight) {
  if (!(p > 0.0)) {
    fail(ErrorCode::InvalidParameter, "mm update: p must be positive, got " + fmt_double(p));
  }
  const Eigen::VectorXd ry = vabs(y);
  if (ry.size() == 0 || ry.maxCoeff() == 0.0) {
    fail(ErrorCode::DegenerateDirection,
         "mm update: zero ascent direction (samples orthogonal to the remaining subspace)");
  }

  if (p == kInfinity) return vsign(y);

  if (p == 1.0) {
    Eigen::Index j = 0;
    for (Eigen::Index i = 1; i < ry.size(); ++i) {
      if (ry[i] > ry[j]) j = i;  // strict: first index wins ties
    }
    QVector out(y.size());
    out.set(static_cast<std::size_t>(j), qsign(y[static_cast<std::size_t>(j)]));
    return out;
  }

  if (p < 1.0) {
    const Eigen::VectorXd base = weight == SmallPWeight::Initial ? vabs(w0) : vabs(w);
    const Eigen::VectorXd rw = vabs(w);
    Eigen::VectorXd factor(rw.size());
    for (Eigen::Index i = 0; i < rw.size(); ++i) factor[i] = base[i] * std::pow(rw[i], 1.0 - p);
    QVector out = real_scale(factor, y);
    const double norm = lp_norm(out, p);
    if (norm == 0.0) {
      fail(ErrorCode::DegenerateDirection,
           "mm update: reweighted ascent direction vanished for p < 1");
    }
    out *= 1.0 / norm;
    return out;
  }

  const double q = p / (p - 1.0);
  const Eigen::VectorXd scale = ry.unaryExpr([q](double x) {
    return x == 0.0 ? 0.0 : std::pow(x, q - 2.0);  // |y|^(q-1) / |y|
  });
  QVector out = real_scale(scale, y);
  out *= 1.0 / lp_norm(out, p);
  return out;
}

QVector mm_update(std::span<const QMatrix> samples, const QVector& w, double s, double p,
                  const QVector& w0, SmallPWeight weight) {
  return mm_maximize_linear(mm_linearization(samples, w, s), w, w0, p, weight);
}

QVector initial_vector(std::size_t n, const FitParams& params) {
  QVector w(n);
  if (params.init == InitKind::Ones) {
    w.part(0).setOnes();
  } else {
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      w.set(i, {dist(rng), dist(rng), dist(rng), dist(rng)});
    }
  }
  w *= 1.0 / lp_norm(w, params.p);
  return w;
}

DirectionResult solve_direction(std::span<const QMatrix> samples, const FitParams& params,
                                std::span<const QVector> orthogonal_to) {
  require_conformant(samples, "solve_direction");
  const std::size_t n = samples[0].cols();
  for (const auto& u : orthogonal_to) {
    if (u.size() != n) fail(ErrorCode::Shape, "solve_direction: orthogonal_to vector length");
  }
  require_params(params, 0, 0);
  if (orthogonal_to.empty()) return solve_deflated(samples, params, orthogonal_to);
  const auto work = deflate_right(samples, QMatrix::from_columns(orthogonal_to, n));
  return solve_deflated(work, params, orthogonal_to);
}

std::vector<QMatrix> deflate_right(std::span<const QMatrix> samples, const QMatrix& q) {
  const QMatrix qh = conj_transpose(q);
  std::vector<QMatrix> out;
  out.reserve(samples.size());
  for (const auto& f : samples) out.push_back(f - matmul(matmul(f, q), qh));
  return out;
}

std::vector<QMatrix> deflate_left(std::span<const QMatrix> samples, const QMatrix& q) {
  const QMatrix qh = conj_transpose(q);
  std::vector<QMatrix> out;
  out.reserve(samples.size());
  for (const auto& f : samples) out.push_back(f - matmul(q, matmul(qh, f)));
  return out;
}

BasisPair fit(std::span<const QMatrix> centered, const QMatrix& mean, const FitParams& params) {
  require_conformant(centered, "fit");
  const std::size_t m = centered[0].rows();
  const std::size_t n = centered[0].cols();
  require_params(params, m, n);
  if (mean.rows() != m || mean.cols() != n) {
    fail(ErrorCode::Shape, "fit: mean image dims do not match samples");
  }

  BasisPair out;
  out.params = params;
  out.mean = mean;

  auto right = run_side(centered, params, params.k2, "right", out.warnings);
  out.v = QMatrix::from_columns(right.directions, n);
  out.d_right = std::move(right.values);
  out.right_info = std::move(right.info);

  // Left pass: ||u* F|| = ||F* u|| and (I - UU*)F = (F*(I - UU*))*, so the
  // right-side machinery runs on the conjugate transposes.
  std::vector<QMatrix> adjoints;
  adjoints.reserve(centered.size());
  for (const auto& f : centered) adjoints.push_back(conj_transpose(f));
  auto left = run_side(adjoints, params, params.k1, "left", out.warnings);
  out.u = QMatrix::from_columns(left.directions, m);
  out.d_left = std::move(left.values);
  out.left_info = std::move(left.info);
  return out;
}

BasisPair truncate(const BasisPair& basis, std::size_t k1, std::size_t k2) {
  if (k1 < 1 || k2 < 1 || k1 > basis.k1() || k2 > basis.k2()) {
    fail(ErrorCode::InvalidParameter,
         "truncate: requested (" + std::to_string(k1) + ", " + std::to_string(k2) +
             ") from a basis with (" + std::to_string(basis.k1()) + ", " +
             std::to_string(basis.k2()) + ") projectors");
  }
  BasisPair out = basis;
  out.u = basis.u.left_cols(k1);
  out.v = basis.v.left_cols(k2);
  out.d_left.resize(k1);
  out.d_right.resize(k2);
  if (out.left_info.size() > k1) out.left_info.resize(k1);
  if (out.right_info.size() > k2) out.right_info.resize(k2);
  out.params.k1 = k1;
  out.params.k2 = k2;
  return out;
}

CovarianceResult covariance_baseline(std::span<const QMatrix> centered, std::size_t k) {
  require_conformant(centered, "covariance_baseline");
  const std::size_t n = centered[0].cols();
  if (k < 1 || k > n) {
    fail(ErrorCode::InvalidParameter, "covariance_baseline: k = " + std::to_string(k) +
                                          " outside [1, " + std::to_string(n) + "]");
  }
  QMatrix g(n, n);
  for (const auto& f : centered) g += matmul(conj_transpose(f), f);
  g *= 1.0 / static_cast<double>(centered.size());
  // Rounding leaves G slightly non-Hermitian; symmetrize before the solve.
  g = 0.5 * (g + conj_transpose(g));

  const auto pairs = hermitian_topk_eig(g, k);
  CovarianceResult out;
  std::vector<QVector> cols;
  for (const auto& pr : pairs) {
    out.eigenvalues.push_back(pr.value);
    cols.push_back(pr.vector);
  }
  out.w = QMatrix::from_columns(cols, n);
  return out;
}

}  // namespace bqpca
