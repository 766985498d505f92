#pragma once

#include "rdmft/fock.hpp"
#include "rdmft/rdm.hpp"
#include "rdmft/search.hpp"
#include "rdmft/tridiag.hpp"

namespace rdmft {

struct GroundStateResult {
  double energy = 0;
  StateVector state;
  OneBodyRDM rdm;
  double gap = 0;  // E1 - E0
  bool degenerate = false;
};

/// Exact diagonalization of H = -2t Jx + u sum n(n-1) on the fixed-N sector.
GroundStateResult ground_state(int n_particles, double t, double u);

struct VariationalReport {
  double e_functional = 0;  // min over gamma of Tr[h gamma] + F[gamma]
  double e_exact = 0;
  double gap = 0;
  OneBodyRDM argmin;
};

/// Minimizes -2t gamma_x + F[gamma] over a disk grid refined around the exact
/// ground-state 1-RDM; should match the eigensolver energy to ~1e-6.
VariationalReport verify_variational_principle(int n_particles, double t,
                                               double u, int grid_resolution,
                                               const SearchOptions& opts = {});

/// Max componentwise residual of the stationarity condition grad_gamma F = -h
/// at the exact ground-state 1-RDM (h = (-2t, 0, 0)), with F gradients by
/// central differences of constrained searches. Throws on a degenerate ground
/// state, where the condition is ill-posed.
double verify_stationarity(int n_particles, double t, double u, double fd_step,
                           const SearchOptions& opts = {});

}  // namespace rdmft
