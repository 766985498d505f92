#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdmft/fock.hpp"
#include "rdmft/rdm.hpp"

namespace rdmft {

enum class Strategy {
  closed_form,
  dual_legendre,
  direct_penalty,
  automatic,  // dual first, direct on failure
};

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

struct SearchOptions {
  double constraint_tolerance = 1e-9;
  int max_iterations = 10000;
  int multistart_count = 8;
  uint64_t seed = 0x5eedULL;
  double penalty_growth = 10.0;
};

struct SearchResult {
  double f_value = 0;            // F = <psi|W|psi> at the minimizer
  StateVector minimizer;
  double constraint_residual = 0;  // max_alpha |<J_alpha> - gamma_alpha|
  double norm_residual = 0;
  int iterations = 0;
  Strategy strategy = Strategy::direct_penalty;
  bool converged = false;
  bool v_representable = true;  // false: dual path found no multipliers
  double multiplier_x = 0, multiplier_y = 0, multiplier_z = 0;
  // Constraint residual after each penalty outer iteration (direct strategy);
  // non-increasing by construction.
  std::vector<double> outer_residual_history;
};

/// Closed-form N=2 constrained search on the real-wave-function disk
/// (gamma_y = 0). f_value is reported per unit |u|, so F/u = sign_u * f_value.
/// At the origin the limit is direction-dependent: pass theta_at_origin.
SearchResult closed_form_n2(double gamma_x, double gamma_z, int sign_u,
                            std::optional<double> theta_at_origin = {});

/// Augmented-Lagrangian direct minimization of <psi|W|psi> over states with
/// the target 1-RDM. Real amplitudes after azimuthal reduction when W
/// commutes with Jz; full complex optimization otherwise. A converged result
/// is polished to machine precision via Newton on the stationarity
/// multipliers (the minimizer is an eigenstate of W + lambda . J).
SearchResult numeric_search_direct(int n_particles, const OneBodyRDM& target,
                                   const HermitianOperator& w,
                                   const SearchOptions& opts = {});

/// Legendre/dual route: finds multipliers h with the ground state of
/// W + h . J matching the target 1-RDM. Valid only on v-representable
/// targets; otherwise returns v_representable = false.
SearchResult numeric_search_dual(int n_particles, const OneBodyRDM& target,
                                 const HermitianOperator& w,
                                 const SearchOptions& opts = {},
                                 std::optional<Eigen::Vector3d> h0 = {});

/// Dispatch on strategy; automatic tries the dual route and falls back to the
/// direct penalty search. closed_form requires N = 2 and on-site W(u = ±1).
SearchResult run_search(Strategy strategy, int n_particles,
                        const OneBodyRDM& target, const HermitianOperator& w,
                        const SearchOptions& opts = {});

/// Ground state of W + h . J (tridiagonal fast path when possible).
StateVector effective_ground_state(const HermitianOperator& w, double hx,
                                   double hy, double hz);

struct SurfaceRow {
  double gamma_x = 0, gamma_z = 0;
  double f_value = 0;
  bool converged = false;
  SearchResult result;  // full result, for QFIM post-processing
};

/// F over the cell-centered grid_resolution^2 Cartesian grid on the bounding
/// square of the disk gamma_x^2 + gamma_z^2 <= (N/2)^2; points outside the
/// disk are omitted. Deterministic given the seed for any thread count.
std::vector<SurfaceRow> functional_surface(int n_particles, int sign_u,
                                           int grid_resolution,
                                           Strategy strategy,
                                           const SearchOptions& opts = {},
                                           bool serial = false);

}  // namespace rdmft
