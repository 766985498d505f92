#pragma once

#include "rdmft/fock.hpp"

namespace rdmft {

/// The 1-RDM of a fixed-N two-mode state, stored as the collective-spin
/// expectation vector gamma = (<Jx>, <Jy>, <Jz>). Representable gammas lie
/// inside the Bloch sphere of radius N/2.
struct OneBodyRDM {
  int n_particles = 0;
  double x = 0, y = 0, z = 0;

  double rho() const { return std::sqrt(x * x + y * y + z * z); }
  /// Polar angle in [0, pi]; 0 at the origin by convention.
  double theta() const;
  /// Azimuth in [0, 2pi); 0 at the origin and on the z-axis by convention.
  double phi() const;
  /// Depletion delta = N/2 - gamma_rho.
  double depletion() const { return 0.5 * n_particles - rho(); }

  bool representable(double tol = 1e-12) const {
    return rho() <= 0.5 * n_particles + tol;
  }

  static OneBodyRDM from_spherical(int n_particles, double rho, double theta,
                                   double phi);
};

OneBodyRDM gamma_from_state(const StateVector& state);

/// Cartesian -> spherical -> Cartesian; identity within 1e-12 away from the
/// origin.
OneBodyRDM spherical_roundtrip(const OneBodyRDM& rdm);

/// S = -Tr[g ln g] of the unit-trace-normalized 2x2 one-body matrix, whose
/// eigenvalues are 1/2 +- gamma_rho/N. Zero for a pure condensate, ln 2 at
/// gamma = 0.
double correlation_entropy(const OneBodyRDM& rdm);

}  // namespace rdmft
