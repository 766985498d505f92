#include "rdmft/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rdmft/parallel.hpp"
#include "rdmft/tridiag.hpp"

namespace rdmft {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_diagonal(const HermitianOperator& w) {
  const int n = w.dim();
  double off = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) off = std::max(off, std::abs(w.entries(i, j)));
  const double scale = std::max(1e-300, w.entries.cwiseAbs().maxCoeff());
  return off <= 1e-14 * scale;
}

double operator_scale(const HermitianOperator& w) {
  return std::max(w.entries.cwiseAbs().maxCoeff(), 1e-3);
}

Eigen::Vector3d gamma3(const Vector& c, const Matrix j[3]) {
  Eigen::Vector3d g;
  for (int a = 0; a < 3; ++a) g[a] = c.dot(j[a] * c).real();
  return g;
}

// Real-amplitude gamma on the tridiagonal path (gamma_y = 0 identically).
Eigen::Vector2d gamma_xz_real(const Eigen::VectorXd& v, int N) {
  double gx = 0, gz = 0;
  for (int n = 0; n < v.size(); ++n) {
    gz += 0.5 * (2 * n - N) * v[n] * v[n];
    if (n + 1 < v.size())
      gx += v[n + 1] * v[n] * std::sqrt(double(n + 1) * double(N - n));
  }
  return {gx, gz};
}

StateVector state_from_real(const FockBasis& basis, const Eigen::VectorXd& v) {
  StateVector s{basis, Vector(v.size())};
  for (int i = 0; i < v.size(); ++i) s.amplitudes[i] = v[i];
  return s;
}

// Spin-coherent state pointing along (theta, phi); the extremal-rho state,
// a useful optimizer start for any target direction.
Vector coherent_amplitudes(int N, double theta, double phi) {
  Vector c(N + 1);
  const double a = std::cos(0.5 * theta), b = std::sin(0.5 * theta);
  for (int n = 0; n <= N; ++n) {
    const double lc = 0.5 * (std::lgamma(N + 1.0) - std::lgamma(n + 1.0) -
                             std::lgamma(N - n + 1.0));
    // left-mode amplitude carries the azimuth phase
    const double mag = std::exp(lc) * std::pow(b, N - n) * std::pow(a, n);
    c[n] = mag * std::polar(1.0, -phi * n);
  }
  // c built for phi up to a sign convention; fix azimuth numerically below
  return c;
}

void fill_common(SearchResult& r, const HermitianOperator& w,
                 const OneBodyRDM& target) {
  r.norm_residual = std::abs(r.minimizer.norm() - 1.0);
  OneBodyRDM g = gamma_from_state(r.minimizer);
  r.constraint_residual = std::max(
      {std::abs(g.x - target.x), std::abs(g.y - target.y),
       std::abs(g.z - target.z)});
  r.f_value = expectation(r.minimizer, w);
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::closed_form: return "closed_form";
    case Strategy::dual_legendre: return "dual_legendre";
    case Strategy::direct_penalty: return "direct_penalty";
    case Strategy::automatic: return "automatic";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  if (name == "closed_form") return Strategy::closed_form;
  if (name == "dual_legendre" || name == "dual") return Strategy::dual_legendre;
  if (name == "direct_penalty" || name == "direct")
    return Strategy::direct_penalty;
  if (name == "automatic" || name == "auto") return Strategy::automatic;
  return std::nullopt;
}

SearchResult closed_form_n2(double gamma_x, double gamma_z, int sign_u,
                            std::optional<double> theta_at_origin) {
  if (sign_u != 1 && sign_u != -1)
    throw std::invalid_argument("closed_form_n2: sign_u must be +1 or -1");
  const double rho = std::hypot(gamma_x, gamma_z);
  if (rho > 1.0 + 1e-12)
    throw std::domain_error("closed_form_n2: gamma outside the N=2 disk");
  const double r = std::min(rho, 1.0);

  double dir_x, dir_z;
  if (rho < 1e-300) {
    // Direction-dependent limit at the origin. Without an explicit direction
    // use the one attaining the true minimum over the gamma = 0 fiber:
    // theta = pi/2 repulsive (|1,1>), any theta attractive (NOON).
    const double th = theta_at_origin.value_or(sign_u > 0 ? 0.5 * kPi : 0.0);
    dir_x = std::sin(th);
    dir_z = std::cos(th);
  } else {
    dir_x = gamma_x / rho;
    dir_z = gamma_z / rho;
  }

  const double cshell = std::sqrt(std::max(0.0, 1.0 - r * r));
  // t = sqrt((1 + sign_u * sqrt(1 - rho^2)) / 2), branch-stable forms
  double t, A;
  if (sign_u > 0) {
    t = std::sqrt(0.5 * (1.0 + cshell));
    A = r / (std::sqrt(2.0) * t);
  } else {
    t = r / std::sqrt(2.0 * (1.0 + cshell));
    A = std::sqrt(1.0 + cshell);
  }
  const double beta = t * dir_x;              // |1,1> amplitude
  const double B = std::sqrt(2.0) * dir_z * t;
  const double a_top = 0.5 * (A + B);         // |2,0> amplitude (n = 2)
  const double a_bot = 0.5 * (A - B);         // |0,2> amplitude (n = 0)

  SearchResult res;
  res.strategy = Strategy::closed_form;
  res.minimizer.basis = build_basis(2);
  res.minimizer.amplitudes = Vector(3);
  res.minimizer.amplitudes << a_bot, beta, a_top;
  res.minimizer.canonicalize();
  res.f_value = sign_u * 2.0 * (1.0 - beta * beta);
  res.norm_residual = std::abs(res.minimizer.norm() - 1.0);
  const Eigen::Vector2d g =
      gamma_xz_real(res.minimizer.amplitudes.real(), 2);
  res.constraint_residual =
      std::max(std::abs(g[0] - gamma_x), std::abs(g[1] - gamma_z));
  if (rho < 1e-300) res.constraint_residual = std::max(g.cwiseAbs().maxCoeff(), 0.0);
  res.converged = true;
  res.v_representable = true;
  return res;
}

// ---------------------------------------------------------------------------
// Dual (Legendre) strategy: root-find multipliers h with the ground state of
// W + h . J reproducing the target gamma.
// ---------------------------------------------------------------------------

namespace {

struct DualEval {
  Eigen::Vector3d gamma = Eigen::Vector3d::Zero();
  double f = 0;       // <W> in the ground state
  double gap = 0;     // E1 - E0, degeneracy guard
  StateVector state;
  bool ok = false;
};

// Tridiagonal fast path: W real tridiagonal, h = (hx, 0, hz).
DualEval dual_eval_tridiag(const HermitianOperator& w, double hx, double hz) {
  DualEval out;
  const int N = w.basis.n_particles;
  Eigen::VectorXd d = w.diagonal_real();
  Eigen::VectorXd e = w.offdiagonal_real();
  for (int n = 0; n <= N; ++n) d[n] += hz * 0.5 * (2 * n - N);
  for (int n = 0; n < N; ++n)
    e[n] += hx * 0.5 * std::sqrt(double(n + 1) * double(N - n));
  TridiagEigenpair pair;
  try {
    pair = smallest_eigenpair_tridiagonal(d, e);
  } catch (const std::exception&) {
    return out;
  }
  auto [l0, l1] = tridiag_two_smallest(d, e);
  out.gap = l1 - l0;
  const Eigen::Vector2d g = gamma_xz_real(pair.vector, N);
  out.gamma = {g[0], 0.0, g[1]};
  out.f = pair.value - hx * g[0] - hz * g[1];
  out.state = state_from_real(w.basis, pair.vector);
  out.ok = true;
  return out;
}

DualEval dual_eval_dense(const HermitianOperator& w, const Matrix j[3],
                         const Eigen::Vector3d& h) {
  DualEval out;
  Matrix ham = w.entries;
  for (int a = 0; a < 3; ++a) ham += h[a] * j[a];
  Eigen::SelfAdjointEigenSolver<Matrix> es(ham);
  if (es.info() != Eigen::Success) return out;
  const int d = w.dim();
  out.gap = d > 1 ? es.eigenvalues()[1] - es.eigenvalues()[0] : 0.0;
  Vector v = es.eigenvectors().col(0);
  out.state = StateVector{w.basis, v};
  out.gamma = gamma3(v, j);
  out.f = es.eigenvalues()[0] - h.dot(out.gamma);
  out.ok = true;
  return out;
}

// Damped Newton on the gamma mismatch; dim is 2 (tridiagonal, gamma_y = 0)
// or 3 (dense). Returns true on meeting tol.
template <typename EvalFn>
bool dual_newton(EvalFn eval, Eigen::VectorXd& h,
                 const Eigen::VectorXd& target, double tol, double gap_floor,
                 int max_iter, int& iters, DualEval& final_eval) {
  const int dim = int(h.size());
  DualEval cur = eval(h);
  if (!cur.ok) return false;
  auto resid = [&](const DualEval& ev) {
    Eigen::VectorXd r(dim);
    if (dim == 2) {
      r << ev.gamma[0] - target[0], ev.gamma[2] - target[1];
    } else {
      for (int a = 0; a < 3; ++a) r[a] = ev.gamma[a] - target[a];
    }
    return r;
  };
  Eigen::VectorXd r = resid(cur);
  for (int it = 0; it < max_iter; ++it) {
    ++iters;
    if (r.lpNorm<Eigen::Infinity>() <= tol) {
      if (cur.gap < gap_floor) return false;  // degenerate: gamma untrusted
      final_eval = cur;
      return true;
    }
    // Central-difference Jacobian d gamma / d h.
    Eigen::MatrixXd jac(dim, dim);
    const double step = 1e-6 * std::max(1.0, h.norm());
    bool jac_ok = true;
    for (int b = 0; b < dim && jac_ok; ++b) {
      Eigen::VectorXd hp = h, hm = h;
      hp[b] += step;
      hm[b] -= step;
      DualEval ep = eval(hp), em = eval(hm);
      if (!ep.ok || !em.ok) {
        jac_ok = false;
        break;
      }
      jac.col(b) = (resid(ep) - resid(em)) / (2.0 * step);
    }
    if (!jac_ok) return false;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd full_step = -lu.solve(r);
    double lam = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 25; ++bt, lam *= 0.5) {
      DualEval trial = eval(h + lam * full_step);
      if (!trial.ok) continue;
      Eigen::VectorXd rt = resid(trial);
      if (rt.norm() < (1.0 - 1e-4 * lam) * r.norm()) {
        h += lam * full_step;
        cur = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  return false;
}

}  // namespace

StateVector effective_ground_state(const HermitianOperator& w, double hx,
                                   double hy, double hz) {
  if (w.real_tridiagonal && hy == 0.0) {
    DualEval ev = dual_eval_tridiag(w, hx, hz);
    if (ev.ok) return ev.state;
  }
  Matrix j[3] = {op_angular(w.basis, Axis::X).entries,
                 op_angular(w.basis, Axis::Y).entries,
                 op_angular(w.basis, Axis::Z).entries};
  DualEval ev = dual_eval_dense(w, j, Eigen::Vector3d(hx, hy, hz));
  if (!ev.ok) throw std::runtime_error("effective_ground_state: solver failed");
  return ev.state;
}

SearchResult numeric_search_dual(int n_particles, const OneBodyRDM& target,
                                 const HermitianOperator& w,
                                 const SearchOptions& opts,
                                 std::optional<Eigen::Vector3d> h0) {
  if (w.basis.n_particles != n_particles)
    throw std::invalid_argument("numeric_search_dual: basis mismatch");
  if (!target.representable(1e-9 * std::max(1, n_particles)))
    throw std::domain_error("numeric_search_dual: target not representable");

  SearchResult res;
  res.strategy = Strategy::dual_legendre;

  // Sphere-surface targets have no finite multipliers: the dual iteration
  // can only approach them from inside, and the square-root sensitivity of
  // the minimizer near the boundary turns a converged-looking residual into
  // a much larger state error. Report them as unreachable so the caller
  // falls back to the exact coherent-state construction.
  if (target.depletion() <= 1e-12 * std::max(1.0, 0.5 * n_particles)) {
    res.v_representable = false;
    return res;
  }

  const double wscale = operator_scale(w);
  const double gap_floor = 1e-11 * std::max(wscale, 1.0);
  const double tol = std::min(opts.constraint_tolerance,
                              1e-12 * std::max(1.0, 0.5 * n_particles));

  // Azimuthal reduction: diagonal W commutes with Jz, so rotate the target
  // into the gamma_y = 0 half-plane and solve there.
  const bool diag_w = is_diagonal(w);
  double phi = 0.0;
  OneBodyRDM tgt = target;
  if (std::abs(target.y) > 0 && diag_w) {
    phi = target.phi();
    tgt = OneBodyRDM{n_particles, std::hypot(target.x, target.y), 0.0,
                     target.z};
  }

  std::mt19937_64 rng(mix_seed(opts.seed, 0x9d));
  std::normal_distribution<double> gauss;
  const int n_starts = std::max(opts.multistart_count, 4);
  const int iters_per_start =
      std::max(30, opts.max_iterations / std::max(1, n_starts));

  const bool tridiag_path = w.real_tridiagonal && std::abs(tgt.y) < 1e-14;
  int iters = 0;
  DualEval winner;
  Eigen::VectorXd h_win;

  if (tridiag_path) {
    auto eval = [&](const Eigen::VectorXd& h) {
      return dual_eval_tridiag(w, h[0], h[1]);
    };
    Eigen::Vector2d dir(tgt.x, tgt.z);
    if (dir.norm() > 0) dir.normalize();
    std::vector<Eigen::VectorXd> starts;
    if (h0) starts.push_back(Eigen::Vector2d((*h0)[0], (*h0)[2]));
    starts.push_back(Eigen::Vector2d::Zero());
    for (int k = 0; int(starts.size()) < n_starts; ++k) {
      if (k < 5 && dir.norm() > 0) {
        starts.push_back(-wscale * std::pow(2.0, k) * dir);
      } else {
        Eigen::Vector2d rnd(gauss(rng), gauss(rng));
        starts.push_back(wscale * std::pow(2.0, k % 7) * rnd.normalized());
      }
    }
    Eigen::VectorXd target2(2);
    target2 << tgt.x, tgt.z;
    for (auto& h : starts) {
      Eigen::VectorXd hh = h;
      DualEval fin;
      if (dual_newton(eval, hh, target2, tol, gap_floor, iters_per_start,
                      iters, fin)) {
        winner = fin;
        h_win = Eigen::Vector3d(hh[0], 0.0, hh[1]);
        break;
      }
    }
  } else {
    Matrix j[3] = {op_angular(w.basis, Axis::X).entries,
                   op_angular(w.basis, Axis::Y).entries,
                   op_angular(w.basis, Axis::Z).entries};
    auto eval = [&](const Eigen::VectorXd& h) {
      return dual_eval_dense(w, j, Eigen::Vector3d(h[0], h[1], h[2]));
    };
    Eigen::Vector3d dir(tgt.x, tgt.y, tgt.z);
    if (dir.norm() > 0) dir.normalize();
    std::vector<Eigen::VectorXd> starts;
    if (h0) starts.push_back(*h0);
    starts.push_back(Eigen::Vector3d::Zero());
    for (int k = 0; int(starts.size()) < n_starts; ++k) {
      if (k < 5 && dir.norm() > 0) {
        starts.push_back(-wscale * std::pow(2.0, k) * dir);
      } else {
        Eigen::Vector3d rnd(gauss(rng), gauss(rng), gauss(rng));
        starts.push_back(wscale * std::pow(2.0, k % 7) * rnd.normalized());
      }
    }
    Eigen::VectorXd target3(3);
    target3 << tgt.x, tgt.y, tgt.z;
    for (auto& h : starts) {
      Eigen::VectorXd hh = h;
      DualEval fin;
      if (dual_newton(eval, hh, target3, tol, gap_floor, iters_per_start,
                      iters, fin)) {
        winner = fin;
        h_win = hh;
        break;
      }
    }
  }

  res.iterations = iters;
  if (!winner.ok) {
    res.converged = false;
    res.v_representable = false;  // not_v_representable for this W
    return res;
  }

  res.minimizer = winner.state;
  if (phi != 0.0) {
    res.minimizer = res.minimizer.rotated_about_z(phi);
    const double c = std::cos(phi), s = std::sin(phi);
    h_win = Eigen::Vector3d(c * h_win[0] - s * h_win[1],
                            s * h_win[0] + c * h_win[1], h_win[2]);
  }
  res.minimizer.canonicalize();
  res.multiplier_x = h_win[0];
  res.multiplier_y = h_win[1];
  res.multiplier_z = h_win[2];
  fill_common(res, w, target);
  res.converged = res.constraint_residual <= opts.constraint_tolerance &&
                  res.norm_residual <= 1e-10;
  res.v_representable = true;
  return res;
}

// ---------------------------------------------------------------------------
// Direct strategy: augmented-Lagrangian minimization of the Rayleigh quotient
// of W subject to the gamma constraints, then a stationarity polish.
// ---------------------------------------------------------------------------

namespace {

struct AlOutcome {
  Vector c;
  double f = 0;
  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
  double gnorm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> outer_residuals;
};

AlOutcome al_minimize(const Matrix& wm, const Matrix j[3],
                      const Eigen::Vector3d& target, Vector c,
                      const SearchOptions& opts, double wscale) {
  AlOutcome out;
  c.normalize();
  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
  double mu = 10.0 * wscale;

  auto eval = [&](const Vector& v, double& lval, Vector& grad,
                  Eigen::Vector3d& g) {
    const Vector wv = wm * v;
    const double energy = v.dot(wv).real();
    Vector jv[3];
    for (int a = 0; a < 3; ++a) {
      jv[a] = j[a] * v;
      g[a] = v.dot(jv[a]).real() - target[a];
    }
    lval = energy + lambda.dot(g) + 0.5 * mu * g.squaredNorm();
    grad = 2.0 * (wv - energy * v);
    for (int a = 0; a < 3; ++a) {
      const double coef = lambda[a] + mu * g[a];
      if (coef != 0.0) grad += 2.0 * coef * (jv[a] - (g[a] + target[a]) * v);
    }
  };

  const int inner_max = 300;
  double best_gnorm = std::numeric_limits<double>::infinity();
  Vector best_c = c;
  Eigen::Vector3d best_lambda = lambda;

  for (int outer = 0; outer < 30; ++outer) {
    double lval;
    Vector grad(c.size());
    Eigen::Vector3d g;
    eval(c, lval, grad, g);
    double alpha = 1.0 / std::max(mu, wscale);
    for (int inner = 0; inner < inner_max; ++inner) {
      ++out.iterations;
      const double gn = grad.norm();
      if (gn <= 1e-11 * std::max(1.0, mu)) break;
      Vector cn = c - alpha * grad;
      cn.normalize();
      double ln;
      Vector gradn(c.size());
      Eigen::Vector3d ggn;
      eval(cn, ln, gradn, ggn);
      int bt = 0;
      while (ln > lval - 1e-8 * alpha * gn * gn && bt < 40) {
        alpha *= 0.5;
        cn = c - alpha * grad;
        cn.normalize();
        eval(cn, ln, gradn, ggn);
        ++bt;
      }
      // Barzilai-Borwein step for the next iteration.
      const Vector s = cn - c;
      const Vector y = gradn - grad;
      const double sy = s.dot(y).real();
      const double ss = s.squaredNorm();
      alpha = sy > 1e-300 ? ss / sy : alpha * 2.0;
      alpha = std::clamp(alpha, 1e-14 / std::max(mu, 1.0), 1e6);
      c = cn;
      grad = gradn;
      lval = ln;
      g = ggn;
      if (out.iterations >= opts.max_iterations) break;
    }
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm < best_gnorm) {
      const bool slow = gnorm > 0.25 * best_gnorm;
      best_gnorm = gnorm;
      best_c = c;
      lambda += mu * g;
      best_lambda = lambda;
      if (slow) mu = std::min(mu * opts.penalty_growth, 1e13 * wscale);
    } else {
      // No improvement: restart the next, stiffer subproblem from the best
      // point seen so far (keeps the residual trace monotone).
      c = best_c;
      lambda = best_lambda;
      mu = std::min(mu * opts.penalty_growth, 1e13 * wscale);
    }
    out.outer_residuals.push_back(best_gnorm);
    if (best_gnorm <= 1e-11 || out.iterations >= opts.max_iterations) break;
  }

  out.c = best_c;
  out.c.normalize();
  out.lambda = best_lambda;
  out.gnorm = best_gnorm;
  const Vector wv = wm * out.c;
  out.f = out.c.dot(wv).real();
  return out;
}

struct PolishOut {
  bool ok = false;
  Vector c;
  double f = 0;
  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
  double gnorm = std::numeric_limits<double>::infinity();
};

// A constrained stationary point satisfies (W + lambda . J) c = eps c, so we
// refine by Newton on lambda: track the eigenvector of W + lambda . J with
// maximal overlap against the current iterate and drive its gamma onto the
// target. The eigenvector-perturbation Jacobian is analytic.
PolishOut polish_stationary(const Matrix& wm, const Matrix j[3],
                            const Eigen::Vector3d& target, Vector c,
                            const Eigen::Vector3d& lambda0, bool real_path,
                            double wscale) {
  PolishOut out;
  const int dim = int(c.size());
  c.normalize();

  // Least-squares multiplier estimate from the stationarity residual.
  Eigen::Vector3d lambda = lambda0;
  {
    Eigen::MatrixXd mat(2 * dim, 4);
    Eigen::VectorXd rhs(2 * dim);
    const Vector wc = wm * c;
    for (int a = 0; a < 3; ++a) {
      const Vector jc = j[a] * c;
      mat.col(a) << jc.real(), jc.imag();
    }
    mat.col(3) << -c.real(), -c.imag();
    rhs << -wc.real(), -wc.imag();
    const Eigen::VectorXd sol =
        mat.colPivHouseholderQr().solve(rhs);
    if (sol.allFinite()) lambda = sol.head<3>();
    if (real_path) lambda[1] = 0.0;
  }

  const std::array<int, 3> active =
      real_path ? std::array<int, 3>{0, 2, -1} : std::array<int, 3>{0, 1, 2};
  const int nact = real_path ? 2 : 3;

  auto eigensolve = [&](const Eigen::Vector3d& lam, Eigen::VectorXd& evals,
                        Matrix& evecs) -> bool {
    Matrix ham = wm;
    for (int a = 0; a < 3; ++a) ham += lam[a] * j[a];
    Eigen::SelfAdjointEigenSolver<Matrix> es(ham);
    if (es.info() != Eigen::Success) return false;
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
    return true;
  };

  auto residual_at = [&](const Eigen::Vector3d& lam, Vector& vk,
                         Eigen::VectorXd& evals, Matrix& evecs, int& k,
                         Eigen::VectorXd& r) -> bool {
    if (!eigensolve(lam, evals, evecs)) return false;
    k = 0;
    double best = -1;
    for (int m = 0; m < dim; ++m) {
      const double ov = std::abs(evecs.col(m).dot(c));
      if (ov > best) {
        best = ov;
        k = m;
      }
    }
    vk = evecs.col(k);
    r.resize(nact);
    for (int ia = 0; ia < nact; ++ia) {
      const int a = active[ia];
      r[ia] = vk.dot(j[a] * vk).real() - target[a];
    }
    return true;
  };

  Vector vk;
  Eigen::VectorXd evals, r;
  Matrix evecs;
  int k = 0;
  if (!residual_at(lambda, vk, evals, evecs, k, r)) return out;

  const double tol = 1e-13 * std::max(1.0, target.lpNorm<Eigen::Infinity>());
  for (int it = 0; it < 60; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= tol) break;
    // d gamma_a / d lambda_b by first-order eigenvector perturbation.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(nact, nact);
    const double gap_guard = 1e-10 * std::max(wscale, 1.0);
    for (int m = 0; m < dim; ++m) {
      if (m == k) continue;
      const double de = evals[k] - evals[m];
      if (std::abs(de) < gap_guard) continue;
      Complex amk[3];
      for (int ia = 0; ia < nact; ++ia) {
        const int a = active[ia];
        amk[ia] = evecs.col(m).dot(j[a] * vk);  // <m|J_a|k>
      }
      for (int ia = 0; ia < nact; ++ia)
        for (int ib = 0; ib < nact; ++ib)
          jac(ia, ib) += 2.0 * (std::conj(amk[ia]) * amk[ib]).real() / de;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) break;
    const Eigen::VectorXd step = -lu.solve(r);
    double damp = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 12; ++bt, damp *= 0.5) {
      Eigen::Vector3d lam_t = lambda;
      for (int ia = 0; ia < nact; ++ia) lam_t[active[ia]] += damp * step[ia];
      Vector vt;
      Eigen::VectorXd evt, rt;
      Matrix mt;
      int kt;
      if (!residual_at(lam_t, vt, evt, mt, kt, rt)) continue;
      if (rt.norm() < (1.0 - 1e-4 * damp) * r.norm()) {
        lambda = lam_t;
        vk = vt;
        evals = evt;
        evecs = mt;
        k = kt;
        r = rt;
        c = vk;  // track the followed eigenvector
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  out.gnorm = r.lpNorm<Eigen::Infinity>();
  out.c = vk;
  out.lambda = lambda;
  out.f = vk.dot(wm * vk).real();
  out.ok = out.gnorm <= 1e-11 * std::max(1.0, target.norm());
  return out;
}

}  // namespace

SearchResult numeric_search_direct(int n_particles, const OneBodyRDM& target,
                                   const HermitianOperator& w,
                                   const SearchOptions& opts) {
  if (w.basis.n_particles != n_particles)
    throw std::invalid_argument("numeric_search_direct: basis mismatch");
  if (!target.representable(1e-9 * std::max(1, n_particles)))
    throw std::domain_error("numeric_search_direct: target not representable");

  // On the Bloch sphere surface the fiber over gamma is a single state, the
  // spin-coherent state along the target direction (and no finite
  // stationarity multipliers exist), so build it outright.
  if (target.depletion() <= 1e-12 * std::max(1.0, 0.5 * n_particles)) {
    SearchResult res;
    res.strategy = Strategy::direct_penalty;
    StateVector coh{
        w.basis, Vector(coherent_amplitudes(n_particles, target.theta(), 0.0)
                            .real()
                            .cast<Complex>())};
    if (target.phi() != 0.0) coh = coh.rotated_about_z(target.phi());
    coh.normalize();
    coh.canonicalize();
    res.minimizer = coh;
    fill_common(res, w, target);
    res.converged = res.constraint_residual <= opts.constraint_tolerance &&
                    res.norm_residual <= 1e-10;
    return res;
  }

  const int dim = n_particles + 1;
  const double wscale = operator_scale(w);

  // Diagonal W commutes with Jz: rotate into the gamma_y = 0 half-plane and
  // keep the amplitudes real (the gamma_y gradient stays inactive there).
  const bool real_path = is_diagonal(w);
  double phi = 0.0;
  Eigen::Vector3d tgt(target.x, target.y, target.z);
  if (real_path && std::abs(target.y) > 0) {
    phi = target.phi();
    tgt = {std::hypot(target.x, target.y), 0.0, target.z};
  }

  Matrix j[3] = {op_angular(w.basis, Axis::X).entries,
                 op_angular(w.basis, Axis::Y).entries,
                 op_angular(w.basis, Axis::Z).entries};

  // Starts: a spin-coherent state along the target direction, then seeded
  // random vectors (real on the reduced path).
  std::mt19937_64 rng(mix_seed(opts.seed, 0x41));
  std::normal_distribution<double> gauss;
  const int n_starts = std::max(opts.multistart_count, 2);
  std::vector<Vector> starts;
  {
    const double rho = tgt.norm();
    const double theta =
        rho > 0 ? std::acos(std::clamp(tgt[2] / rho, -1.0, 1.0)) : 0.5 * kPi;
    Vector coh = coherent_amplitudes(n_particles, theta, 0.0);
    starts.push_back(real_path ? Vector(coh.real().cast<Complex>()) : coh);
  }
  while (int(starts.size()) < n_starts) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = real_path ? Complex(gauss(rng), 0.0)
                       : Complex(gauss(rng), gauss(rng));
    starts.push_back(v);
  }

  SearchOptions per_start = opts;
  per_start.max_iterations =
      std::max(500, opts.max_iterations / std::max(1, n_starts));

  // Each start is minimized, then polished onto the exact stationarity
  // manifold (the minimizer is an eigenstate of W + lambda . J). Selection
  // is by feasibility first, energy second: comparing energies of iterates
  // with unequal constraint violations is meaningless, and the polish
  // removes the violation where it can.
  struct Candidate {
    Vector c;
    Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
    double f = std::numeric_limits<double>::infinity();
    double gnorm = std::numeric_limits<double>::infinity();
    std::vector<double> outer_residuals;
  };
  Candidate best;
  int total_iters = 0;
  for (auto& s : starts) {
    AlOutcome o = al_minimize(w.entries, j, tgt, s, per_start, wscale);
    total_iters += o.iterations;
    Candidate cand;
    cand.outer_residuals = o.outer_residuals;
    PolishOut pol = polish_stationary(w.entries, j, tgt, o.c, o.lambda,
                                      real_path, wscale);
    if (pol.ok && pol.gnorm <= o.gnorm) {
      cand.c = pol.c;
      cand.lambda = pol.lambda;
      cand.f = pol.f;
      cand.gnorm = pol.gnorm;
    } else {
      cand.c = o.c;
      cand.lambda = o.lambda;
      cand.f = o.f;
      cand.gnorm = o.gnorm;
    }
    const bool cand_feasible = cand.gnorm <= opts.constraint_tolerance;
    const bool best_feasible = best.gnorm <= opts.constraint_tolerance;
    const bool better =
        (cand_feasible && !best_feasible) ||
        (cand_feasible == best_feasible &&
         (cand_feasible ? cand.f < best.f : cand.gnorm < best.gnorm));
    if (better) best = std::move(cand);
  }

  const Vector& c_final = best.c;
  Eigen::Vector3d lam_final = best.lambda;

  SearchResult res;
  res.strategy = Strategy::direct_penalty;
  res.iterations = total_iters;
  res.outer_residual_history = best.outer_residuals;
  res.minimizer = StateVector{w.basis, c_final};
  if (phi != 0.0) {
    res.minimizer = res.minimizer.rotated_about_z(phi);
    const double cp = std::cos(phi), sp = std::sin(phi);
    lam_final = Eigen::Vector3d(cp * lam_final[0] - sp * lam_final[1],
                                sp * lam_final[0] + cp * lam_final[1],
                                lam_final[2]);
  }
  res.minimizer.normalize();
  res.minimizer.canonicalize();
  res.multiplier_x = lam_final[0];
  res.multiplier_y = lam_final[1];
  res.multiplier_z = lam_final[2];
  fill_common(res, w, target);
  res.converged = res.constraint_residual <= opts.constraint_tolerance &&
                  res.norm_residual <= 1e-10;
  res.v_representable = true;  // the direct path makes no claim either way
  return res;
}

SearchResult run_search(Strategy strategy, int n_particles,
                        const OneBodyRDM& target, const HermitianOperator& w,
                        const SearchOptions& opts) {
  switch (strategy) {
    case Strategy::closed_form: {
      if (n_particles != 2)
        throw std::invalid_argument("run_search: closed form needs N = 2");
      const double u = w.entries(0, 0).real() * 0.5;  // diag(2u, 0, 2u)
      if (std::abs(std::abs(u) - 1.0) > 1e-12)
        throw std::invalid_argument("run_search: closed form needs u = +-1");
      return closed_form_n2(target.x, target.z, u > 0 ? 1 : -1);
    }
    case Strategy::dual_legendre:
      return numeric_search_dual(n_particles, target, w, opts);
    case Strategy::direct_penalty:
      return numeric_search_direct(n_particles, target, w, opts);
    case Strategy::automatic: {
      SearchResult r = numeric_search_dual(n_particles, target, w, opts);
      if (!r.converged) r = numeric_search_direct(n_particles, target, w, opts);
      return r;
    }
  }
  throw std::invalid_argument("run_search: unknown strategy");
}

std::vector<SurfaceRow> functional_surface(int n_particles, int sign_u,
                                           int grid_resolution,
                                           Strategy strategy,
                                           const SearchOptions& opts,
                                           bool serial) {
  if (grid_resolution < 2)
    throw std::invalid_argument("functional_surface: grid must be >= 2");
  if (strategy == Strategy::closed_form && n_particles != 2)
    throw std::invalid_argument(
        "functional_surface: closed-form strategy needs N = 2");

  const FockBasis basis = build_basis(n_particles);
  const HermitianOperator w = op_onsite_interaction(basis, double(sign_u));
  const double radius = 0.5 * n_particles;

  auto coord = [&](int i) {
    return radius * (-1.0 + (2.0 * i + 1.0) / grid_resolution);
  };

  struct Point {
    double gx, gz;
    int index;
  };
  std::vector<Point> pts;
  for (int iz = 0; iz < grid_resolution; ++iz)
    for (int ix = 0; ix < grid_resolution; ++ix) {
      const double gx = coord(ix), gz = coord(iz);
      if (std::hypot(gx, gz) <= radius + 1e-12)
        pts.push_back({gx, gz, iz * grid_resolution + ix});
    }

  std::vector<SurfaceRow> rows(pts.size());
  parallel_for(
      int(pts.size()),
      [&](int i) {
        const Point& p = pts[i];
        SearchOptions local = opts;
        local.seed = mix_seed(opts.seed, uint64_t(p.index));
        OneBodyRDM tgt{n_particles, p.gx, 0.0, p.gz};
        SearchResult r = run_search(strategy, n_particles, tgt, w, local);
        rows[i] = SurfaceRow{p.gx, p.gz, r.f_value, r.converged, std::move(r)};
      },
      serial);
  return rows;
}

}  // namespace rdmft
