#pragma once

#include <Eigen/Dense>
#include <utility>

namespace rdmft {

/// Eigenpair of a real symmetric tridiagonal matrix.
struct TridiagEigenpair {
  double value = 0;
  Eigen::VectorXd vector;
  double residual = 0;  // ||T v - value v||
};

/// Number of eigenvalues of tridiag(diag, offdiag) strictly below x
/// (Sturm sequence count).
int sturm_count_below(const Eigen::VectorXd& diag,
                      const Eigen::VectorXd& offdiag, double x);

/// k-th smallest eigenvalue (k = 0 is the smallest), by bisection.
double tridiag_eigenvalue(const Eigen::VectorXd& diag,
                          const Eigen::VectorXd& offdiag, int k);

/// Eigenvector for a computed eigenvalue via inverse iteration; optionally
/// orthogonalized against `against` (for clustered eigenvalues).
Eigen::VectorXd tridiag_eigenvector(const Eigen::VectorXd& diag,
                                    const Eigen::VectorXd& offdiag,
                                    double eigenvalue,
                                    const Eigen::VectorXd* against = nullptr);

/// Smallest eigenpair; residual <= ~1e-12 ||T||.
TridiagEigenpair smallest_eigenpair_tridiagonal(const Eigen::VectorXd& diag,
                                                const Eigen::VectorXd& offdiag);

/// Two smallest eigenvalues (for gap reporting).
std::pair<double, double> tridiag_two_smallest(const Eigen::VectorXd& diag,
                                               const Eigen::VectorXd& offdiag);

}  // namespace rdmft
