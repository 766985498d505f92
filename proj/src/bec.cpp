#include "rdmft/bec.hpp"

#include <algorithm>
#include <cmath>

namespace rdmft {

namespace {

double lchoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

double sin2(double theta) {
  const double s = std::sin(theta);
  return s * s;
}

// cos(phi) as printed, |cos(2 phi)| after re-minimizing over the ansatz
// branch (the branch energies carry cos(2 phi), so the minimum is -|.|).
double cross_angle_factor(double phi, BranchRule rule) {
  return rule == BranchRule::fixed_sign ? std::cos(phi)
                                        : std::abs(std::cos(2.0 * phi));
}

double mzz_of_state(const StateVector& s) {
  const int N = s.basis.n_particles;
  double jz = 0, jz2 = 0;
  for (int n = 0; n <= N; ++n) {
    const double z = 0.5 * (2 * n - N);
    const double p = std::norm(s.amplitudes[n]);
    jz += z * p;
    jz2 += z * z * p;
  }
  return 4.0 * (jz2 - jz * jz);
}

}  // namespace

Eigen::Matrix2cd rotated_mode_matrix(double theta, double phi) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  Eigen::Matrix2cd u;
  u(0, 0) = c;
  u(0, 1) = std::polar(s, phi);
  u(1, 0) = -std::polar(s, -phi);
  u(1, 1) = c;
  return u;
}

StateVector rotated_fock_state(const FockBasis& basis, int n_theta_excitations,
                               double theta, double phi) {
  const int N = basis.n_particles;
  const int q = n_theta_excitations;
  if (q < 0 || q > N)
    throw std::invalid_argument("rotated_fock_state: excitation count");
  const int p = N - q;
  const Eigen::Matrix2cd u = rotated_mode_matrix(theta, phi);
  const Complex modes[4] = {u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
  double lmag[4], ang[4];
  for (int k = 0; k < 4; ++k) {
    const double a = std::abs(modes[k]);
    lmag[k] = std::log(a);  // -inf on exact zeros, guarded below
    ang[k] = a > 0 ? std::arg(modes[k]) : 0.0;
  }
  auto contrib = [&](int k, int e) {
    return e == 0 ? 0.0 : e * lmag[k];
  };

  StateVector out{basis, Vector::Zero(N + 1)};
  for (int n = 0; n <= N; ++n) {
    // (a_rho^dag)^p (a_theta^dag)^q expanded over left-count n; log-space
    // magnitudes keep N ~ 1000 binomials in range.
    const double pref = 0.5 * (std::lgamma(n + 1.0) + std::lgamma(N - n + 1.0) -
                               std::lgamma(p + 1.0) - std::lgamma(q + 1.0));
    Complex acc = 0;
    for (int i = std::max(0, n - q); i <= std::min(p, n); ++i) {
      const int j = n - i;
      const double lm = lchoose(p, i) + lchoose(q, j) + contrib(0, i) +
                        contrib(1, p - i) + contrib(2, j) +
                        contrib(3, q - j) + pref;
      if (!std::isfinite(lm)) continue;  // a zero mode coefficient
      const double a = i * ang[0] + (p - i) * ang[1] + j * ang[2] +
                       (q - j) * ang[3];
      acc += std::polar(std::exp(lm), a);
    }
    out.amplitudes[n] = acc;
  }
  out.normalize();
  return out;
}

OneBodyRDM rotated_state_gamma(int n_particles, int n_theta_excitations,
                               double theta, double phi) {
  return gamma_from_state(rotated_fock_state(build_basis(n_particles),
                                             n_theta_excitations, theta, phi));
}

TruncatedBecState truncated_bec_state(int n_particles, double delta_rho,
                                      double theta, double phi,
                                      int branch_sign) {
  if (n_particles < 2)
    throw std::invalid_argument("truncated_bec_state: need N >= 2");
  if (delta_rho < 0 || delta_rho > 2)
    throw std::domain_error("truncated_bec_state: delta_rho outside [0, 2]");
  if (branch_sign != 1 && branch_sign != -1)
    throw std::invalid_argument("truncated_bec_state: branch sign");
  TruncatedBecState t;
  t.delta_rho = delta_rho;
  t.branch_sign = branch_sign;
  t.beta1 = std::sqrt(0.5 * delta_rho);
  t.beta0 = std::sqrt(1.0 - 0.5 * delta_rho);
  const FockBasis basis = build_basis(n_particles);
  const StateVector s0 = rotated_fock_state(basis, 0, theta, phi);
  const StateVector s2 = rotated_fock_state(basis, 2, theta, phi);
  t.state = StateVector{
      basis, t.beta0 * s0.amplitudes +
                 double(branch_sign) * t.beta1 * s2.amplitudes};
  t.state.normalize();
  return t;
}

BecExpansion bec_expansion(int n_particles, double theta, double phi,
                           BranchRule rule) {
  const double N = n_particles;
  const double s2 = sin2(theta);
  const double root = std::sqrt(N * (N - 1.0));
  const double ang = cross_angle_factor(phi, rule);
  BecExpansion e;
  e.n_particles = n_particles;
  e.theta = theta;
  e.phi = phi;
  e.E0 = N * (N - 1.0) * (1.0 - 0.5 * s2);
  e.Ehalf = s2 * ang * root;
  e.E1 = (N - 2.0) * (3.0 * s2 - 2.0);
  e.E32 = 0.25 * s2 * ang * root;
  e.M0 = N * s2;
  e.M12 = 2.0 * s2 * ang * root;
  e.M1 = 8.0 + 2.0 * (N - 6.0) * s2;
  return e;
}

double f_expansion(int n_particles, double delta_rho, double theta, double phi,
                   BranchRule rule) {
  const BecExpansion e = bec_expansion(n_particles, theta, phi, rule);
  const double r = std::sqrt(std::max(0.0, delta_rho));
  return e.E0 - e.Ehalf * r + e.E1 * delta_rho +
         e.E32 * delta_rho * r;
}

double mzz_expansion(int n_particles, double delta, double theta, double phi,
                     BranchRule rule) {
  const BecExpansion e = bec_expansion(n_particles, theta, phi, rule);
  return e.M0 - e.M12 * std::sqrt(std::max(0.0, delta)) + e.M1 * delta;
}

double exact_ansatz_expectation(int n_particles, double delta_rho, double theta,
                            double phi, int branch_sign) {
  const double N = n_particles;
  const double s2 = sin2(theta);
  const double base =
      N * N - 2.0 * (N - 2.0) * delta_rho -
      0.5 * s2 * (N * (N - 1.0) - 6.0 * (N - 2.0) * delta_rho);
  const double cross = branch_sign * std::cos(2.0 * phi) * s2 *
                       std::sqrt(N * (N - 1.0)) *
                       std::sqrt(delta_rho * (1.0 - 0.5 * delta_rho));
  return base + cross;
}

ScalingReport asymptotic_validation(int n_particles, double theta, double phi,
                                    const std::vector<double>& delta_grid,
                                    const SearchOptions& opts) {
  const int N = n_particles;
  const FockBasis basis = build_basis(N);
  const HermitianOperator w = op_onsite_interaction(basis, 1.0);

  // Continuation: solve from the largest depletion inward, warm-starting the
  // dual multipliers (they diverge as delta -> 0).
  std::vector<double> order = delta_grid;
  std::sort(order.begin(), order.end(), std::greater<double>());

  ScalingReport rep;
  std::vector<std::pair<double, double>> pts;  // (delta, residual)
  std::optional<Eigen::Vector3d> h_prev;
  for (double delta : order) {
    double mzz_num;
    if (delta <= 0) {
      mzz_num = mzz_of_state(rotated_fock_state(basis, 0, theta, phi));
    } else {
      const OneBodyRDM target =
          OneBodyRDM::from_spherical(N, 0.5 * N - delta, theta, phi);
      SearchResult r = numeric_search_dual(N, target, w, opts, h_prev);
      if (!r.converged) continue;
      h_prev = Eigen::Vector3d(r.multiplier_x, r.multiplier_y, r.multiplier_z);
      mzz_num = mzz_of_state(r.minimizer);
    }
    const double resid = std::abs(
        mzz_num - mzz_expansion(N, delta, theta, phi, BranchRule::minimized));
    pts.emplace_back(delta, resid);
  }
  std::sort(pts.begin(), pts.end());
  for (auto& [d, r] : pts) {
    rep.deltas.push_back(d);
    rep.residuals.push_back(r);
  }

  // Log-log slope over residuals above the eigensolver noise floor.
  const double floor = 1e-12 * double(N) * double(N);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].first <= 0 || pts[i].second <= floor) continue;
    const double x = std::log(pts[i].first), y = std::log(pts[i].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  rep.points_fitted = m;
  if (m >= 3) {
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  } else {
    rep.degenerate = true;
  }
  return rep;
}

}  // namespace rdmft
