#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "rdmft/tridiag.hpp"

using namespace rdmft;

namespace {

Eigen::MatrixXd dense_from(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  const int n = int(d.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = d[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = e[i];
  }
  return m;
}

}  // namespace

TEST_CASE("2x2 example") {
  Eigen::VectorXd d(2), e(1);
  d << 0, 0;
  e << 1;
  const TridiagEigenpair p = smallest_eigenpair_tridiagonal(d, e);
  CHECK(p.value == doctest::Approx(-1.0));
  CHECK(std::abs(std::abs(p.vector[0]) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(p.vector[0] * p.vector[1] < 0);  // eigenvector of -1 alternates sign
  CHECK(p.residual <= 1e-12);
}

TEST_CASE("1x1 and constant-diagonal edge cases") {
  Eigen::VectorXd d1(1), e0(0);
  d1 << 3.5;
  const TridiagEigenpair p = smallest_eigenpair_tridiagonal(d1, e0);
  CHECK(p.value == doctest::Approx(3.5));

  Eigen::VectorXd d(4), e(3);
  d.setConstant(2.0);
  e.setZero();
  CHECK(smallest_eigenpair_tridiagonal(d, e).value == doctest::Approx(2.0));
}

TEST_CASE("random matrices against the dense eigensolver") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 5; ++rep) {
    const int n = rep == 0 ? 200 : 20 + 17 * rep;
    Eigen::VectorXd d(n), e(n - 1);
    for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    for (int i = 0; i < n - 1; ++i) e[i] = gauss(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_from(d, e));
    const TridiagEigenpair p = smallest_eigenpair_tridiagonal(d, e);
    CHECK(std::abs(p.value - es.eigenvalues()[0]) <= 1e-9);
    auto [l0, l1] = tridiag_two_smallest(d, e);
    CHECK(std::abs(l0 - es.eigenvalues()[0]) <= 1e-9);
    CHECK(std::abs(l1 - es.eigenvalues()[1]) <= 1e-9);
    for (int k = 0; k < 5; ++k)
      CHECK(std::abs(tridiag_eigenvalue(d, e, k) - es.eigenvalues()[k]) <=
            1e-9);
    // eigenvector up to sign
    Eigen::VectorXd ref = es.eigenvectors().col(0);
    if (ref.dot(p.vector) < 0) ref = -ref;
    CHECK((ref - p.vector).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("Sturm counts partition the spectrum") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;
  const int n = 60;
  Eigen::VectorXd d(n), e(n - 1);
  for (int i = 0; i < n; ++i) d[i] = gauss(rng);
  for (int i = 0; i < n - 1; ++i) e[i] = gauss(rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_from(d, e));
  const auto& ev = es.eigenvalues();
  CHECK(sturm_count_below(d, e, ev[0] - 1e-8) == 0);
  CHECK(sturm_count_below(d, e, ev[n - 1] + 1e-8) == n);
  for (int k : {5, 17, 30, 55}) {
    const double mid = 0.5 * (ev[k - 1] + ev[k]);
    CHECK(sturm_count_below(d, e, mid) == k);
  }
}

TEST_CASE("residual bound on the returned pair") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 5 + rep * 7;
    Eigen::VectorXd d(n), e(n - 1);
    for (int i = 0; i < n; ++i) d[i] = 3.0 * gauss(rng);
    for (int i = 0; i < n - 1; ++i) e[i] = 3.0 * gauss(rng);
    const TridiagEigenpair p = smallest_eigenpair_tridiagonal(d, e);
    const Eigen::MatrixXd m = dense_from(d, e);
    const double scale = m.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK((m * p.vector - p.value * p.vector).norm() <= 1e-10 * scale);
    CHECK(std::abs(p.vector.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("clustered eigenvalues stay orthogonal") {
  // nearly-degenerate bottom pair
  const int n = 30;
  Eigen::VectorXd d(n), e(n - 1);
  d.setZero();
  e.setConstant(1e-14);
  d[0] = -5.0;
  d[1] = -5.0 + 1e-12;
  const double l0 = tridiag_eigenvalue(d, e, 0);
  const double l1 = tridiag_eigenvalue(d, e, 1);
  const Eigen::VectorXd v0 = tridiag_eigenvector(d, e, l0);
  const Eigen::VectorXd v1 = tridiag_eigenvector(d, e, l1, &v0);
  CHECK(std::abs(v0.dot(v1)) <= 1e-8);
  CHECK(std::abs(v0.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(v1.norm() - 1.0) <= 1e-12);
}
