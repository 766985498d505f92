#include "rdmft/rdm.hpp"

#include <cmath>

namespace rdmft {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double OneBodyRDM::theta() const {
  const double r = rho();
  if (r == 0.0) return 0.0;
  return std::acos(std::clamp(z / r, -1.0, 1.0));
}

double OneBodyRDM::phi() const {
  if (x == 0.0 && y == 0.0) return 0.0;
  double p = std::atan2(y, x);
  if (p < 0) p += kTwoPi;
  if (p >= kTwoPi) p = 0.0;
  return p;
}

OneBodyRDM OneBodyRDM::from_spherical(int n_particles, double rho,
                                      double theta, double phi) {
  return OneBodyRDM{n_particles, rho * std::sin(theta) * std::cos(phi),
                    rho * std::sin(theta) * std::sin(phi),
                    rho * std::cos(theta)};
}

OneBodyRDM gamma_from_state(const StateVector& state) {
  OneBodyRDM g;
  g.n_particles = state.basis.n_particles;
  const int N = g.n_particles;
  const Vector& c = state.amplitudes;
  Complex jplus = 0;  // <J+> with J+ = bl^dag br, raises the left count
  double jz = 0;
  for (int n = 0; n < c.size(); ++n) {
    jz += (0.5 * (2 * n - N)) * std::norm(c[n]);
    if (n + 1 < c.size())
      jplus += std::conj(c[n + 1]) * c[n] *
               std::sqrt(double(n + 1) * double(N - n));
  }
  g.x = jplus.real();
  g.y = jplus.imag();
  g.z = jz;
  if (!g.representable(1e-9 * std::max(1, N)))
    throw std::runtime_error("gamma_from_state: non-representable gamma");
  return g;
}

OneBodyRDM spherical_roundtrip(const OneBodyRDM& rdm) {
  return OneBodyRDM::from_spherical(rdm.n_particles, rdm.rho(), rdm.theta(),
                                    rdm.phi());
}

double correlation_entropy(const OneBodyRDM& rdm) {
  const double N = rdm.n_particles;
  const double r = N > 0 ? std::min(0.5, rdm.rho() / N) : 0.5;
  auto xlnx = [](double p) { return p > 0 ? p * std::log(p) : 0.0; };
  return -(xlnx(0.5 + r) + xlnx(0.5 - r));
}

}  // namespace rdmft
