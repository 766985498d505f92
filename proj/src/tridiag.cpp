#include "rdmft/tridiag.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace rdmft {

namespace {

double matrix_scale(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  double s = 0;
  for (int i = 0; i < d.size(); ++i) s = std::max(s, std::abs(d[i]));
  for (int i = 0; i < e.size(); ++i) s = std::max(s, std::abs(e[i]));
  return std::max(s, 1e-300);
}

// Gershgorin interval containing all eigenvalues.
std::pair<double, double> gershgorin(const Eigen::VectorXd& d,
                                     const Eigen::VectorXd& e) {
  const int n = int(d.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < n; ++i) {
    double r = 0;
    if (i > 0) r += std::abs(e[i - 1]);
    if (i < n - 1) r += std::abs(e[i]);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  return {lo, hi};
}

// Solve (T - sigma I) x = b by LU with partial pivoting (fill-in bandwidth 2).
Eigen::VectorXd shifted_tridiag_solve(const Eigen::VectorXd& d,
                                      const Eigen::VectorXd& e, double sigma,
                                      Eigen::VectorXd b) {
  const int n = int(d.size());
  Eigen::VectorXd du(std::max(0, n - 1)), du2(std::max(0, n - 2));
  Eigen::VectorXd dl(std::max(0, n - 1)), dd(n);
  for (int i = 0; i < n; ++i) dd[i] = d[i] - sigma;
  for (int i = 0; i + 1 < n; ++i) {
    du[i] = e[i];
    dl[i] = e[i];
  }
  du2.setZero();
  const double tiny = 1e-302;

  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(dd[i]) >= std::abs(dl[i])) {
      if (std::abs(dd[i]) < tiny) dd[i] = std::copysign(tiny, dd[i]);
      const double m = dl[i] / dd[i];
      dd[i + 1] -= m * du[i];
      b[i + 1] -= m * b[i];
      dl[i] = 0;  // store nothing; forward elimination applied to b directly
      if (i + 2 < n) du2[i] = 0;
    } else {
      // swap rows i, i+1
      const double m = dd[i] / dl[i];
      std::swap(dd[i], dl[i]);
      double t = du[i];
      du[i] = dd[i + 1];
      dd[i + 1] = t - m * dd[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -m * du[i + 1];
      }
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= m * b[i];
      dl[i] = 0;
    }
  }
  if (std::abs(dd[n - 1]) < tiny) dd[n - 1] = std::copysign(tiny, dd[n - 1]);

  Eigen::VectorXd x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    if (i + 1 < n) s -= du[i] * x[i + 1];
    if (i + 2 < n) s -= du2[i] * x[i + 2];
    x[i] = s / dd[i];
  }
  return x;
}

double residual_norm(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                     double lambda, const Eigen::VectorXd& v) {
  const int n = int(d.size());
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    double s = (d[i] - lambda) * v[i];
    if (i > 0) s += e[i - 1] * v[i - 1];
    if (i + 1 < n) s += e[i] * v[i + 1];
    acc += s * s;
  }
  return std::sqrt(acc);
}

}  // namespace

int sturm_count_below(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                      double x) {
  const int n = int(d.size());
  int count = 0;
  double q = 1.0;
  const double tiny = 1e-300;
  for (int i = 0; i < n; ++i) {
    const double e2 = i > 0 ? e[i - 1] * e[i - 1] : 0.0;
    q = d[i] - x - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0) ++count;
  }
  return count;
}

double tridiag_eigenvalue(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                          int k) {
  const int n = int(d.size());
  if (n == 0) throw std::invalid_argument("empty matrix");
  if (e.size() != n - 1) throw std::invalid_argument("offdiag length mismatch");
  if (k < 0 || k >= n) throw std::invalid_argument("eigenvalue index");
  auto [lo, hi] = gershgorin(d, e);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 120 && hi - lo > 4 * std::numeric_limits<double>::epsilon() *
                                   std::max(scale, 1e-300);
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count_below(d, e, mid) <= k)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd tridiag_eigenvector(const Eigen::VectorXd& d,
                                    const Eigen::VectorXd& e, double lambda,
                                    const Eigen::VectorXd* against) {
  const int n = int(d.size());
  if (n == 1) return Eigen::VectorXd::Ones(1);
  const double scale = matrix_scale(d, e);
  std::mt19937_64 rng(0x7215f0c1u);
  std::normal_distribution<double> gauss;

  Eigen::VectorXd best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 4; ++attempt) {
    // Perturb the shift slightly so the solve stays well posed.
    const double sigma =
        lambda + (attempt % 2 ? 1.0 : -1.0) * attempt *
                     std::numeric_limits<double>::epsilon() * scale;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    if (against) v -= against->dot(v) * (*against);
    v.normalize();
    for (int it = 0; it < 8; ++it) {
      v = shifted_tridiag_solve(d, e, sigma, v);
      if (against) v -= against->dot(v) * (*against);
      const double nv = v.norm();
      if (!(nv > 0) || !std::isfinite(nv)) break;
      v /= nv;
      const double res = residual_norm(d, e, lambda, v);
      if (res < best_res) {
        best_res = res;
        best = v;
      }
      if (res <= 1e-14 * scale) return best;
    }
    if (best_res <= 1e-12 * scale) break;
  }
  if (best.size() == 0)
    throw std::runtime_error("inverse iteration failed to produce a vector");
  return best;
}

TridiagEigenpair smallest_eigenpair_tridiagonal(const Eigen::VectorXd& d,
                                                const Eigen::VectorXd& e) {
  TridiagEigenpair out;
  out.value = tridiag_eigenvalue(d, e, 0);
  out.vector = tridiag_eigenvector(d, e, out.value);
  // Rayleigh-quotient refinement sharpens the eigenvalue past bisection width.
  double rq = 0;
  {
    const int n = int(d.size());
    for (int i = 0; i < n; ++i) {
      double s = d[i] * out.vector[i];
      if (i > 0) s += e[i - 1] * out.vector[i - 1];
      if (i + 1 < n) s += e[i] * out.vector[i + 1];
      rq += out.vector[i] * s;
    }
  }
  out.value = rq;
  out.vector = tridiag_eigenvector(d, e, out.value);
  out.residual = residual_norm(d, e, out.value, out.vector);
  return out;
}

std::pair<double, double> tridiag_two_smallest(const Eigen::VectorXd& d,
                                               const Eigen::VectorXd& e) {
  if (d.size() == 1) return {d[0], d[0]};
  return {tridiag_eigenvalue(d, e, 0), tridiag_eigenvalue(d, e, 1)};
}

}  // namespace rdmft
