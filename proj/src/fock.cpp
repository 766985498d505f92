#include "rdmft/fock.hpp"

#include <cmath>

namespace rdmft {

FockBasis build_basis(int n_particles) {
  if (n_particles < 0) throw std::invalid_argument("n_particles must be >= 0");
  return FockBasis{n_particles};
}

Eigen::VectorXd HermitianOperator::diagonal_real() const {
  return entries.diagonal().real();
}

Eigen::VectorXd HermitianOperator::offdiagonal_real() const {
  const int n = dim();
  Eigen::VectorXd off(std::max(0, n - 1));
  for (int i = 0; i + 1 < n; ++i) off[i] = entries(i + 1, i).real();
  return off;
}

double HermitianOperator::hermiticity_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

void StateVector::canonicalize(double zero_tol) {
  for (int i = 0; i < amplitudes.size(); ++i) {
    const Complex a = amplitudes[i];
    if (std::abs(a) > zero_tol) {
      amplitudes *= std::conj(a) / std::abs(a);
      return;
    }
  }
}

StateVector StateVector::rotated_about_z(double phi) const {
  StateVector out = *this;
  for (int n = 0; n < amplitudes.size(); ++n)
    out.amplitudes[n] = amplitudes[n] * std::polar(1.0, -phi * n);
  return out;
}

StateVector fock_state(const FockBasis& basis, int n_left) {
  if (n_left < 0 || n_left > basis.n_particles)
    throw std::invalid_argument("fock_state: index out of range");
  StateVector s{basis, Vector::Zero(basis.dim())};
  s.amplitudes[n_left] = 1.0;
  return s;
}

HermitianOperator op_angular(const FockBasis& basis, Axis axis) {
  const int N = basis.n_particles;
  const int d = basis.dim();
  HermitianOperator op{basis, Matrix::Zero(d, d), false};
  switch (axis) {
    case Axis::Z:
      for (int n = 0; n < d; ++n) op.entries(n, n) = 0.5 * (2 * n - N);
      op.real_tridiagonal = true;
      break;
    case Axis::X:
      // <n+1| Jx |n> = (1/2) sqrt((n+1)(N-n))
      for (int n = 0; n + 1 < d; ++n) {
        const double v = 0.5 * std::sqrt(double(n + 1) * double(N - n));
        op.entries(n + 1, n) = v;
        op.entries(n, n + 1) = v;
      }
      op.real_tridiagonal = true;
      break;
    case Axis::Y:
      // <n+1| Jy |n> = -i/2 sqrt((n+1)(N-n))
      for (int n = 0; n + 1 < d; ++n) {
        const double v = 0.5 * std::sqrt(double(n + 1) * double(N - n));
        op.entries(n + 1, n) = Complex(0, -v);
        op.entries(n, n + 1) = Complex(0, v);
      }
      break;
  }
  return op;
}

HermitianOperator op_onsite_interaction(const FockBasis& basis, double u) {
  const int N = basis.n_particles;
  const int d = basis.dim();
  HermitianOperator op{basis, Matrix::Zero(d, d), true};
  for (int n = 0; n < d; ++n) {
    const double nl = n, nr = N - n;
    op.entries(n, n) = u * (nl * (nl - 1) + nr * (nr - 1));
  }
  return op;
}

HermitianOperator op_general_coupling(const FockBasis& basis,
                                      const CouplingSet& couplings) {
  const int d = basis.dim();
  HermitianOperator op{basis, Matrix::Zero(d, d), false};
  Matrix j[3] = {op_angular(basis, Axis::X).entries,
                 op_angular(basis, Axis::Y).entries,
                 op_angular(basis, Axis::Z).entries};
  for (const auto& [key, u] : couplings.entries) {
    if (u == 0.0) continue;
    const Matrix& a = j[int(key.first)];
    const Matrix& b = j[int(key.second)];
    op.entries += 0.5 * u * (a * b + b * a);
  }
  // Symmetrize away rounding asymmetry.
  op.entries = 0.5 * (op.entries + op.entries.adjoint()).eval();
  return op;
}

HermitianOperator op_hamiltonian(const FockBasis& basis, double t, double u) {
  HermitianOperator op = op_onsite_interaction(basis, u);
  const Matrix jx = op_angular(basis, Axis::X).entries;
  op.entries += (-2.0 * t) * jx;
  op.real_tridiagonal = true;
  return op;
}

double expectation(const StateVector& state, const HermitianOperator& op) {
  if (!(state.basis == op.basis))
    throw std::invalid_argument("expectation: basis mismatch");
  const Complex v = state.amplitudes.dot(op.entries * state.amplitudes);
  const double scale = std::max(1.0, std::abs(v));
  if (std::abs(v.imag()) > 1e-12 * scale)
    throw std::runtime_error("expectation: non-real value for Hermitian op");
  return v.real();
}

double anticommutator_expectation(const StateVector& state,
                                  const HermitianOperator& a,
                                  const HermitianOperator& b) {
  const Vector wa = a.entries * state.amplitudes;
  const Vector wb = b.entries * state.amplitudes;
  return 2.0 * wa.dot(wb).real();
}

double verify_number_operator_identity(const FockBasis& basis) {
  const int N = basis.n_particles;
  const Matrix lhs = op_onsite_interaction(basis, 1.0).entries;
  const Matrix jz = op_angular(basis, Axis::Z).entries;
  const Matrix rhs = 2.0 * jz * jz +
                     (0.5 * N * N - N) * Matrix::Identity(basis.dim(), basis.dim());
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace rdmft
