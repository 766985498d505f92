#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

namespace rdmft {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Axis { X = 0, Y = 1, Z = 2 };

inline constexpr Axis kAxes[3] = {Axis::X, Axis::Y, Axis::Z};

/// Fixed-N two-mode bosonic Fock space. Index n maps to |n, N-n> with n
/// bosons in the left mode, ascending n = 0..N.
struct FockBasis {
  int n_particles = 0;

  int dim() const { return n_particles + 1; }

  bool operator==(const FockBasis& other) const {
    return n_particles == other.n_particles;
  }
};

FockBasis build_basis(int n_particles);

/// Dense Hermitian operator on a fixed-N basis. `real_tridiagonal` marks
/// matrices that are real symmetric tridiagonal, enabling the O(N)
/// eigensolver path.
struct HermitianOperator {
  FockBasis basis;
  Matrix entries;
  bool real_tridiagonal = false;

  int dim() const { return basis.dim(); }

  // Real diagonal / first off-diagonal, valid on the tridiagonal path.
  Eigen::VectorXd diagonal_real() const;
  Eigen::VectorXd offdiagonal_real() const;

  double hermiticity_defect() const;
};

struct StateVector {
  FockBasis basis;
  Vector amplitudes;

  double norm() const { return amplitudes.norm(); }
  void normalize() { amplitudes.normalize(); }

  /// Fixes the global phase so the first nonzero amplitude is real positive.
  void canonicalize(double zero_tol = 1e-12);

  /// Applies exp(-i*phi*n) per Fock index, a U(1) rotation about z (up to a
  /// global phase): gamma's azimuth increases by phi.
  StateVector rotated_about_z(double phi) const;
};

StateVector fock_state(const FockBasis& basis, int n_left);

/// Symmetric coupling table u_{alpha beta}, one entry per unordered pair.
struct CouplingSet {
  std::map<std::pair<Axis, Axis>, double> entries;
  std::optional<double> single_u;  // on-site model strength

  static std::pair<Axis, Axis> key(Axis a, Axis b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  }
  void set(Axis a, Axis b, double u) { entries[key(a, b)] = u; }
  double get(Axis a, Axis b) const {
    auto it = entries.find(key(a, b));
    return it == entries.end() ? 0.0 : it->second;
  }
  bool involves_y() const {
    for (const auto& [k, u] : entries)
      if (u != 0.0 && (k.first == Axis::Y || k.second == Axis::Y)) return true;
    return false;
  }
};

/// Schwinger-boson angular momentum J_alpha in the fixed-N sector.
/// Jz is diagonal with entries (2n-N)/2; Jx, Jy are tridiagonal.
HermitianOperator op_angular(const FockBasis& basis, Axis axis);

/// W = u * sum_j n_j (n_j - 1), diagonal.
HermitianOperator op_onsite_interaction(const FockBasis& basis, double u);

/// W = (1/2) sum_{a<=b} u_ab {J_a, J_b}. The 1/2 makes the literal
/// coupling-derivative relation M_ab = 4 [dF/du_ab - g_a g_b] hold against
/// the pure-state covariance form (see qfim module).
HermitianOperator op_general_coupling(const FockBasis& basis,
                                      const CouplingSet& couplings);

/// Dimer Hamiltonian H = -2t Jx + u sum_j n_j(n_j - 1); real symmetric
/// tridiagonal.
HermitianOperator op_hamiltonian(const FockBasis& basis, double t, double u);

/// <psi|Op|psi>. Throws on basis mismatch; asserts the imaginary part is
/// below 1e-12 (relative).
double expectation(const StateVector& state, const HermitianOperator& op);

/// <psi|{A,B}|psi> = 2 Re <A psi, B psi>.
double anticommutator_expectation(const StateVector& state,
                                  const HermitianOperator& a,
                                  const HermitianOperator& b);

/// Max entrywise deviation of sum_j n_j(n_j-1) vs 2 Jz^2 + N^2/2 - N.
double verify_number_operator_identity(const FockBasis& basis);

}  // namespace rdmft
