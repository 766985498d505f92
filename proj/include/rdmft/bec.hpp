#pragma once

#include <vector>

#include "rdmft/fock.hpp"
#include "rdmft/rdm.hpp"
#include "rdmft/search.hpp"

namespace rdmft {

/// Handling of the sign branch in the sqrt(delta) cross term of the
/// condensation-point expansions.
///   fixed_sign: the series exactly as printed, cross factor cos(phi); picks
///     one branch and is the form behind the depletion-map figures.
///   minimized: the constrained-search-consistent choice, re-minimizing over
///     the +- branch of the two-amplitude ansatz, cross factor |cos(2 phi)|;
///     this is what the exact truncated-ansatz energy actually attains.
enum class BranchRule { fixed_sign, minimized };

/// 2x2 unitary sending the (left, right) modes to the (rho, theta) rotated
/// pair; row 0 is the condensate mode a_rho.
Eigen::Matrix2cd rotated_mode_matrix(double theta, double phi);

/// |N - n, n> in the rotated modes, expanded over the left/right Fock basis.
StateVector rotated_fock_state(const FockBasis& basis, int n_theta_excitations,
                               double theta, double phi);

/// 1-RDM of the rotated Fock state: ((N - 2n)/2) (sin t cos p, sin t sin p,
/// cos t).
OneBodyRDM rotated_state_gamma(int n_particles, int n_theta_excitations,
                               double theta, double phi);

struct TruncatedBecState {
  double beta0 = 1, beta1 = 0;
  int branch_sign = 1;
  double delta_rho = 0;  // 2 beta1^2 = N/2 - gamma_rho
  StateVector state;
};

/// Two-amplitude condensate ansatz beta0 |N,0>_rho + sign beta1 |N-2,2>_rho.
TruncatedBecState truncated_bec_state(int n_particles, double delta_rho,
                                      double theta, double phi,
                                      int branch_sign);

struct BecExpansion {
  int n_particles = 0;
  double theta = 0, phi = 0;
  // F series: F = E0 - Ehalf sqrt(d) + E1 d + E32 d^(3/2)
  double E0 = 0, Ehalf = 0, E1 = 0, E32 = 0;
  // Mzz series: Mzz = M0 - M12 sqrt(d) + M1 d
  double M0 = 0, M12 = 0, M1 = 0;
};

BecExpansion bec_expansion(int n_particles, double theta, double phi,
                           BranchRule rule = BranchRule::fixed_sign);

double f_expansion(int n_particles, double delta_rho, double theta, double phi,
                   BranchRule rule = BranchRule::fixed_sign);

double mzz_expansion(int n_particles, double delta, double theta, double phi,
                     BranchRule rule = BranchRule::fixed_sign);

/// Exact <n_l^2 + n_r^2> of the truncated ansatz, valid at any depletion in
/// [0, 2]; the oracle behind f_expansion (which equals this minus N up to
/// O(delta^(5/2)) after branch minimization).
double exact_ansatz_expectation(int n_particles, double delta_rho, double theta,
                            double phi, int branch_sign);

struct ScalingReport {
  std::vector<double> deltas;
  std::vector<double> residuals;
  double slope = 0;        // log-log fit over points above the noise floor
  int points_fitted = 0;
  bool degenerate = false;  // too few residuals above the solver floor
};

/// Numeric Mzz (dual constrained search, warm-started continuation in delta)
/// minus the branch-minimized expansion; the remainder should scale like
/// delta^(3/2).
ScalingReport asymptotic_validation(int n_particles, double theta, double phi,
                                    const std::vector<double>& delta_grid,
                                    const SearchOptions& opts = {});

}  // namespace rdmft
