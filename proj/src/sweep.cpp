#include "rdmft/sweep.hpp"

#include <cmath>
#include <cstdio>

#include "rdmft/bec.hpp"
#include "rdmft/parallel.hpp"

namespace rdmft {

std::vector<SweepRow> run_sweep(int n_particles, double u, int grid,
                                Strategy strategy, const SearchOptions& opts,
                                bool serial) {
  if (grid < 2) throw std::invalid_argument("run_sweep: grid must be >= 2");
  const FockBasis basis = build_basis(n_particles);
  const HermitianOperator w = op_onsite_interaction(basis, u);
  const double radius = 0.5 * n_particles;
  auto coord = [&](int i) {
    return radius * (-1.0 + (2.0 * i + 1.0) / grid);
  };

  struct Point {
    double gx, gz;
    int index;
  };
  std::vector<Point> pts;
  for (int iz = 0; iz < grid; ++iz)
    for (int ix = 0; ix < grid; ++ix) {
      const double gx = coord(ix), gz = coord(iz);
      if (std::hypot(gx, gz) <= radius + 1e-12)
        pts.push_back({gx, gz, iz * grid + ix});
    }

  std::vector<SweepRow> rows(pts.size());
  parallel_for(
      int(pts.size()),
      [&](int i) {
        const Point& p = pts[i];
        SweepRow row;
        row.gamma_x = p.gx;
        row.gamma_z = p.gz;
        SearchOptions local = opts;
        local.seed = mix_seed(opts.seed, uint64_t(p.index));
        try {
          const OneBodyRDM tgt{n_particles, p.gx, 0.0, p.gz};
          SearchResult r = run_search(strategy, n_particles, tgt, w, local);
          row.f = r.f_value;
          row.converged = r.converged;
          if (r.minimizer.amplitudes.size() > 0) {
            const QfimMatrix m = qfim_from_state(r.minimizer);
            row.m_xx = m(Axis::X, Axis::X);
            row.m_yy = m(Axis::Y, Axis::Y);
            row.m_zz = m(Axis::Z, Axis::Z);
            row.m_xz = m(Axis::X, Axis::Z);
          }
        } catch (const std::exception&) {
          row.converged = false;
        }
        rows[i] = row;
      },
      serial);
  return rows;
}

std::vector<BecMapRow> run_bec_map(int n_particles, double delta, int grid,
                                   bool with_numeric,
                                   const SearchOptions& opts, bool serial) {
  if (grid < 2) throw std::invalid_argument("run_bec_map: grid must be >= 2");
  if (delta < 0) throw std::invalid_argument("run_bec_map: delta must be >= 0");
  const double pi = 3.14159265358979323846;
  const int n = grid * grid;
  std::vector<BecMapRow> rows(n);
  const FockBasis basis = build_basis(n_particles);
  const HermitianOperator w = op_onsite_interaction(basis, 1.0);

  parallel_for(
      n,
      [&](int i) {
        const int it = i / grid, ip = i % grid;
        BecMapRow row;
        row.theta = pi * it / (grid - 1);
        row.phi = 2.0 * pi * ip / (grid - 1);
        row.delta = delta;
        row.mzz_expansion = mzz_expansion(n_particles, delta, row.theta,
                                          row.phi, BranchRule::fixed_sign);
        row.exceeds_sql = row.mzz_expansion > n_particles + 1e-12;
        if (with_numeric && delta > 0 &&
            delta < 0.5 * n_particles - 1e-12) {
          SearchOptions local = opts;
          local.seed = mix_seed(opts.seed, uint64_t(i));
          try {
            const OneBodyRDM tgt = OneBodyRDM::from_spherical(
                n_particles, 0.5 * n_particles - delta, row.theta, row.phi);
            SearchResult r =
                run_search(Strategy::automatic, n_particles, tgt, w, local);
            if (r.converged) {
              const QfimMatrix m = qfim_from_state(r.minimizer);
              row.mzz_numeric = m(Axis::Z, Axis::Z);
            }
          } catch (const std::exception&) {
          }
        }
        rows[i] = row;
      },
      serial);
  return rows;
}

std::string format_csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "gamma_x,gamma_z,F,M_xx,M_yy,M_zz,M_xz,converged\n";
  for (const auto& r : rows) {
    out += format_csv_number(r.gamma_x) + "," + format_csv_number(r.gamma_z) +
           "," + format_csv_number(r.f) + "," + format_csv_number(r.m_xx) +
           "," + format_csv_number(r.m_yy) + "," + format_csv_number(r.m_zz) +
           "," + format_csv_number(r.m_xz) + "," + (r.converged ? "1" : "0") +
           "\n";
  }
  return out;
}

std::string bec_map_csv(const std::vector<BecMapRow>& rows) {
  std::string out = "theta,phi,delta,mzz_expansion,mzz_numeric,exceeds_sql\n";
  for (const auto& r : rows) {
    out += format_csv_number(r.theta) + "," + format_csv_number(r.phi) + "," +
           format_csv_number(r.delta) + "," +
           format_csv_number(r.mzz_expansion) + ",";
    if (r.mzz_numeric) out += format_csv_number(*r.mzz_numeric);
    out += std::string(",") + (r.exceeds_sql ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace rdmft
