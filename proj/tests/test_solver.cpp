#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "quaternion.hpp"
#include "solver.hpp"
#include "support/synthetic.hpp"

using namespace bqpca;
using namespace bqpca::testing;

namespace {

QMatrix real_diag(std::initializer_list<double> d, std::size_t rows = 0) {
  const std::size_t n = d.size();
  QMatrix f(rows ? rows : n, n);
  std::size_t i = 0;
  for (double x : d) {
    if (i < f.rows()) f.set(i, i, {x, 0, 0, 0});
    ++i;
  }
  return f;
}

QVector make_vector(std::initializer_list<Quaternion> entries) {
  QVector v(entries.size());
  std::size_t i = 0;
  for (const auto& q : entries) v.set(i++, q);
  return v;
}

QMatrix column(const QVector& v) { return QMatrix::from_columns(std::span(&v, 1), v.size()); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

FitParams tight(double s = 2.0, double p = 2.0) {
  FitParams params;
  params.s = s;
  params.p = p;
  params.tol = 1e-14;
  params.max_iter = 20000;
  return params;
}

double orthonormality_error(const QMatrix& q) {
  return fro_norm(matmul(conj_transpose(q), q) - QMatrix::identity(q.cols()));
}

}  // namespace

TEST_CASE("objective examples") {
  const std::vector<QMatrix> f{real_diag({2, 1})};
  CHECK(objective(f, QVector::unit(2, 0), Side::Right, 2.0) == doctest::Approx(4.0));
  CHECK(objective(f, QVector(2), Side::Right, 2.0) == 0.0);

  QMatrix row(1, 2);
  row.set(0, 0, {0, 1, 0, 0});
  row.set(0, 1, {0, 0, 1, 0});
  const std::vector<QMatrix> g{row};
  CHECK(objective(g, QVector::unit(2, 1), Side::Right, 1.0) == doctest::Approx(1.0));
  // Left side: ||w* F||, with w of length m.
  CHECK(objective(g, QVector::unit(1, 0), Side::Left, 2.0) == doctest::Approx(2.0));
  CHECK(code_of([&] { objective(g, QVector(3), Side::Right, 2.0); }) == ErrorCode::Shape);
  CHECK(code_of([&] { objective(g, QVector(2), Side::Left, 2.0); }) == ErrorCode::Shape);
}

TEST_CASE("left objective equals right objective on adjoints") {
  std::mt19937_64 rng(20);
  const auto samples = centered_random_samples(5, 4, 3, rng);
  std::vector<QMatrix> adj;
  for (const auto& f : samples) adj.push_back(conj_transpose(f));
  const auto u = random_qvector(4, rng);
  for (double s : {1.0, 1.5, 2.0, 3.0}) {
    CHECK(objective(samples, u, Side::Left, s) ==
          doctest::Approx(objective(adj, u, Side::Right, s)).epsilon(1e-13));
  }
}

TEST_CASE("p = 1 and p = inf maximizers") {
  const QVector dummy(2);
  const auto p1 = mm_maximize_linear(make_vector({{3, 0, 0, 0}, {-1, 0, 0, 0}}), dummy, dummy, 1.0);
  CHECK(p1[0] == Quaternion{1, 0, 0, 0});
  CHECK(p1[1] == Quaternion{});

  // Smallest index wins a modulus tie.
  const auto tie = mm_maximize_linear(make_vector({{0, 2, 0, 0}, {0, 0, 2, 0}}), dummy, dummy, 1.0);
  CHECK(tie[0] == Quaternion{0, 1, 0, 0});
  CHECK(tie[1] == Quaternion{});

  const auto pinf =
      mm_maximize_linear(make_vector({{0, 0, 0, 2}, {}}), dummy, dummy, kInfinity);
  CHECK(pinf[0] == Quaternion{0, 0, 0, 1});
  CHECK(pinf[1] == Quaternion{});

  CHECK(code_of([&] { mm_maximize_linear(QVector(2), dummy, dummy, 2.0); }) ==
        ErrorCode::DegenerateDirection);
}

TEST_CASE("maximizers satisfy the p-norm constraint and beat random feasible points") {
  std::mt19937_64 rng(21);
  for (double p : {0.5, 1.0, 1.5, 2.0, 3.0, kInfinity}) {
    for (int t = 0; t < 20; ++t) {
      const auto y = random_qvector(6, rng);
      auto w = random_qvector(6, rng);
      w *= 1.0 / lp_norm(w, p);
      const auto next = mm_maximize_linear(y, w, w, p);
      CHECK(std::abs(lp_norm(next, p) - 1.0) <= 1e-12);
      if (p >= 1.0) {
        // Re(y* w) over the unit p-ball is maximized by `next` (Hoelder).
        for (int r = 0; r < 20; ++r) {
          auto z = random_qvector(6, rng);
          z *= 1.0 / lp_norm(z, p);
          CHECK(inner(y, z).w0 <= inner(y, next).w0 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("small-p update uses the initial or the current modulus") {
  const auto y = make_vector({{1, 0, 0, 0}, {1, 0, 0, 0}});
  const auto w = make_vector({{0.25, 0, 0, 0}, {1, 0, 0, 0}});
  const auto w0 = make_vector({{1, 0, 0, 0}, {0, 0, 0, 0}});
  const auto initial = mm_maximize_linear(y, w, w0, 0.5, SmallPWeight::Initial);
  // |w0| zeroes the second entry.
  CHECK(initial[1] == Quaternion{});
  CHECK(initial[0].w0 == doctest::Approx(1.0));
  const auto current = mm_maximize_linear(y, w, w0, 0.5, SmallPWeight::Current);
  // |w|^(1-p) |w| = |w|^1.5 -> (0.125, 1) before normalization.
  CHECK(current[1].w0 / current[0].w0 == doctest::Approx(8.0));
  CHECK(lp_norm(current, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("MM iteration on diag(2,1) reaches the dominant right singular vector") {
  const std::vector<QMatrix> f{real_diag({2, 1})};
  QVector w(2);
  w.set(0, {1 / std::sqrt(2.0), 0, 0, 0});
  w.set(1, {1 / std::sqrt(2.0), 0, 0, 0});
  const QVector w0 = w;
  for (int k = 0; k < 60; ++k) w = mm_update(f, w, 2.0, 2.0, w0);

  // Oracle: top right singular vectors of the real representation.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(real_repr(f[0]), Eigen::ComputeFullV);
  const QVector top = from_real_vec(svd.matrixV().col(0));
  CHECK(max_principal_angle_sin(column(top), column(w)) <= 1e-12);
  CHECK(objective(f, w, Side::Right, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("solve_direction examples") {
  SUBCASE("diag(5,1,0)") {
    const std::vector<QMatrix> f{real_diag({5, 1, 0})};
    const auto r = solve_direction(f, tight());
    CHECK(r.objective == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(max_principal_angle_sin(column(QVector::unit(3, 0)), column(r.vector)) <= 1e-6);
    CHECK(r.converged);
  }
  SUBCASE("default tolerance still lands near the oracle") {
    const std::vector<QMatrix> f{real_diag({5, 1, 0})};
    const auto r = solve_direction(f, FitParams{});
    CHECK(r.objective == doctest::Approx(25.0).epsilon(1e-4));
  }
  SUBCASE("all-zero samples") {
    const std::vector<QMatrix> f{QMatrix(3, 3), QMatrix(3, 3)};
    CHECK(code_of([&] { solve_direction(f, FitParams{}); }) == ErrorCode::DegenerateDirection);
  }
  SUBCASE("orthogonal to e1 on diag(5,3)") {
    const std::vector<QMatrix> f{real_diag({5, 3})};
    const std::vector<QVector> done{QVector::unit(2, 0)};
    const auto r = solve_direction(f, tight(), done);
    CHECK(r.objective == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(qabs(r.vector[0]) <= 1e-12);
    CHECK(qabs(r.vector[1]) == doctest::Approx(1.0));
  }
  SUBCASE("nonconformant samples") {
    const std::vector<QMatrix> f{QMatrix(2, 2), QMatrix(2, 3)};
    CHECK(code_of([&] { solve_direction(f, FitParams{}); }) == ErrorCode::Shape);
  }
}

TEST_CASE("fit on diag(3,2,1)") {
  const std::vector<QMatrix> f{real_diag({3, 2, 1})};
  auto params = tight();
  params.k1 = 1;
  params.k2 = 2;
  const auto basis = fit(f, QMatrix(3, 3), params);
  REQUIRE(basis.k2() == 2);
  REQUIRE(basis.d_right.size() == 2);
  CHECK(basis.d_right[0] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(basis.d_right[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(qabs(basis.v(0, 0)) == doctest::Approx(1.0));
  CHECK(qabs(basis.v(1, 1)) == doctest::Approx(1.0));
  CHECK(basis.d_left.size() == 1);
  CHECK(basis.d_left[0] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(basis.warnings.empty());
}

TEST_CASE("parameter validation") {
  const std::vector<QMatrix> f{real_diag({3, 2, 1})};
  FitParams params;
  params.k1 = 0;
  CHECK(code_of([&] { fit(f, QMatrix(3, 3), params); }) == ErrorCode::InvalidParameter);
  params.k1 = 4;
  CHECK(code_of([&] { fit(f, QMatrix(3, 3), params); }) == ErrorCode::InvalidParameter);

  FitParams bad;
  bad.s = 0.5;
  bad.p = 0.0;
  bad.k1 = 0;
  bad.k2 = 9;
  const auto problems = validate(bad, 3, 3);
  CHECK(problems.size() == 4);
  const auto has = [&](const std::string& needle) {
    return std::any_of(problems.begin(), problems.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
  };
  CHECK(has("p > 0"));
  CHECK(has("s >= 1"));
  CHECK(validate(FitParams{}, 3, 3).empty());
  FitParams inf;
  inf.p = kInfinity;
  CHECK(validate(inf, 3, 3).empty());
}

TEST_CASE("fit reports the exhausted direction index") {
  // Rank-one samples: only one right direction carries energy.
  const std::vector<QMatrix> f{real_diag({3, 0, 0}), real_diag({-3, 0, 0})};
  auto params = tight();
  params.k2 = 2;
  try {
    fit(f, QMatrix(3, 3), params);
    FAIL("expected DegenerateDirection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDirection);
    REQUIRE(e.direction_index.has_value());
    CHECK(*e.direction_index == 2);
  }
}

TEST_CASE("max_iter cap produces a warning, not an error") {
  std::mt19937_64 rng(22);
  const auto samples = centered_random_samples(6, 5, 4, rng);
  FitParams params;
  params.tol = 0.0;
  params.max_iter = 3;
  const auto basis = fit(samples, QMatrix(5, 4), params);
  CHECK(basis.warnings.size() == 2);
  CHECK_FALSE(basis.right_info[0].converged);
  CHECK(basis.right_info[0].iterations == 3);
}

TEST_CASE("MM monotonicity and constraints across (s, p)") {
  std::mt19937_64 rng(23);
  const auto samples = centered_random_samples(10, 8, 6, rng);
  for (double s : {1.0, 1.5, 2.0, 3.0}) {
    for (double p : {0.5, 1.0, 2.0, kInfinity}) {
      CAPTURE(s);
      CAPTURE(p);
      FitParams params;
      params.s = s;
      params.p = p;
      const auto r = solve_direction(samples, params);
      for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
        const double prev = r.objective_trace[k - 1];
        CHECK(r.objective_trace[k] >= prev - 1e-10 * std::abs(prev));
      }
      for (double c : r.constraint_trace) CHECK(std::abs(c - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("current-modulus variant for p < 1 also runs") {
  std::mt19937_64 rng(24);
  const auto samples = centered_random_samples(10, 8, 6, rng);
  FitParams params;
  params.p = 0.5;
  params.small_p_weight = SmallPWeight::Current;
  params.k1 = 2;
  params.k2 = 2;
  const auto basis = fit(samples, QMatrix(8, 6), params);
  CHECK(orthonormality_error(basis.u) <= 1e-8);
  CHECK(orthonormality_error(basis.v) <= 1e-8);
}

TEST_CASE("fitted bases are orthonormal and deflation annihilates them") {
  std::mt19937_64 rng(25);
  const auto samples = centered_random_samples(8, 6, 5, rng);
  for (double p : {0.5, 1.0, 2.0, kInfinity}) {
    FitParams params;
    params.s = 1.5;
    params.p = p;
    params.k1 = 4;
    params.k2 = 3;
    params.init = InitKind::Random;
    params.seed = 7;
    const auto basis = fit(samples, QMatrix(6, 5), params);
    CHECK(orthonormality_error(basis.u) <= 1e-8);
    CHECK(orthonormality_error(basis.v) <= 1e-8);
    for (double d : basis.d_left) CHECK(d >= 0.0);
    for (double d : basis.d_right) CHECK(d >= 0.0);
    const auto right = deflate_right(samples, basis.v);
    const auto left = deflate_left(samples, basis.u);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double scale = fro_norm(samples[i]);
      CHECK(fro_norm(matmul(right[i], basis.v)) <= 1e-8 * scale);
      CHECK(fro_norm(matmul(conj_transpose(basis.u), left[i])) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("objective values are marginal contributions") {
  // At s = 2 the deflated objectives add up: sum_t f^t = sum_i ||F_i V||_F^2.
  std::mt19937_64 rng(26);
  const auto samples = centered_random_samples(8, 6, 5, rng);
  auto params = tight();
  params.k1 = 3;
  params.k2 = 3;
  const auto basis = fit(samples, QMatrix(6, 5), params);
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto v = basis.v.left_cols(k);
    double captured = 0.0;
    for (const auto& f : samples) captured += std::pow(fro_norm(matmul(f, v)), 2);
    double total = 0.0;
    for (std::size_t t = 0; t < k; ++t) total += basis.d_right[t];
    CHECK(total == doctest::Approx(captured).epsilon(1e-10));
  }
}

TEST_CASE("covariance baseline examples") {
  const std::vector<QMatrix> f{real_diag({2, 1})};
  const auto r = covariance_baseline(f, 2);
  CHECK(r.eigenvalues[0] == doctest::Approx(4.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(qabs(r.w(0, 0)) == doctest::Approx(1.0));
  CHECK(qabs(r.w(1, 1)) == doctest::Approx(1.0));

  // F* F = I for unitary samples.
  std::mt19937_64 rng(27);
  std::vector<QMatrix> unitary;
  for (int t = 0; t < 3; ++t) unitary.push_back(orthonormal_columns(random_qmatrix(3, 3, rng)));
  const auto u = covariance_baseline(unitary, 3);
  for (double x : u.eigenvalues) CHECK(x == doctest::Approx(1.0));

  CHECK(code_of([&] { covariance_baseline(f, 0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { covariance_baseline(f, 3); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("s = p = 2 fit matches the covariance eigenspace") {
  std::mt19937_64 rng(28);
  const std::vector<double> sigma{4.0, 3.0, 2.2, 1.6, 1.1, 0.7};
  const auto set = spectrum_set(10, 8, 6, sigma, rng);
  for (std::size_t k : {1, 2, 3}) {
    auto params = tight();
    params.k1 = 1;
    params.k2 = k;
    const auto basis = fit(set.samples, QMatrix(8, 6), params);
    const auto cov = covariance_baseline(set.samples, k);
    CHECK(max_principal_angle(cov.w, basis.v) <= 1e-4);
    CHECK(max_principal_angle(set.eigenvectors.left_cols(k), basis.v) <= 1e-4);
    for (std::size_t t = 0; t < k; ++t) {
      CHECK(cov.eigenvalues[t] == doctest::Approx(set.eigenvalues[t] / 10.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("real samples reproduce real 2DPCA") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<Eigen::MatrixXd> real;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(8, 6);
  for (int t = 0; t < 10; ++t) {
    real.push_back(Eigen::MatrixXd::NullaryExpr(8, 6, [&] { return d(rng); }));
    mean += real.back() / 10.0;
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
  std::vector<QMatrix> samples;
  for (auto& a : real) {
    a -= mean;
    g += a.transpose() * a;
    samples.push_back(real_matrix(a));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  auto params = tight();
  params.k2 = 3;
  const auto basis = fit(samples, QMatrix(8, 6), params);
  const Eigen::MatrixXd top = es.eigenvectors().rightCols(3).rowwise().reverse();
  CHECK(max_principal_angle(real_matrix(top), basis.v) <= 1e-6);
}

TEST_CASE("truncation equals a smaller fit") {
  std::mt19937_64 rng(30);
  const auto samples = centered_random_samples(6, 5, 4, rng);
  FitParams params;
  params.k1 = 4;
  params.k2 = 3;
  const auto full = fit(samples, QMatrix(5, 4), params);
  params.k1 = 2;
  params.k2 = 1;
  const auto small = fit(samples, QMatrix(5, 4), params);
  const auto cut = truncate(full, 2, 1);
  for (int c = 0; c < 4; ++c) {
    CHECK(cut.u.part(c) == small.u.part(c));
    CHECK(cut.v.part(c) == small.v.part(c));
  }
  CHECK(cut.d_left == small.d_left);
  CHECK(cut.d_right == small.d_right);
  CHECK(cut.params.k1 == 2);
  CHECK(code_of([&] { truncate(full, 5, 1); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { truncate(full, 0, 1); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("fit is deterministic") {
  std::mt19937_64 rng(31);
  const auto samples = centered_random_samples(6, 5, 4, rng);
  FitParams params;
  params.p = 1.0;
  params.s = 1.0;
  params.k1 = 2;
  params.k2 = 2;
  const auto a = fit(samples, QMatrix(5, 4), params);
  const auto b = fit(samples, QMatrix(5, 4), params);
  for (int c = 0; c < 4; ++c) {
    CHECK(a.u.part(c) == b.u.part(c));
    CHECK(a.v.part(c) == b.v.part(c));
  }
  CHECK(a.d_right == b.d_right);
}
