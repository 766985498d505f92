#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdmft/qfim.hpp"
#include "rdmft/search.hpp"

namespace rdmft {

struct SweepRow {
  double gamma_x = 0, gamma_z = 0;
  double f = 0;
  double m_xx = 0, m_yy = 0, m_zz = 0, m_xz = 0;
  bool converged = false;
};

/// F and the QFIM of the on-site model W(u) over the cell-centered
/// grid x grid square, masked to the disk gamma_rho <= N/2 (+1e-12).
/// Rows are emitted in grid index order (gamma_z outer, gamma_x inner), so
/// output is identical for any thread count.
std::vector<SweepRow> run_sweep(int n_particles, double u, int grid,
                                Strategy strategy, const SearchOptions& opts,
                                bool serial = false);

struct BecMapRow {
  double theta = 0, phi = 0, delta = 0;
  double mzz_expansion = 0;
  std::optional<double> mzz_numeric;
  bool exceeds_sql = false;
};

/// Depletion map of the Mzz expansion (literal fixed-sign series, the form
/// behind the phi-dependent figure) on an inclusive grid over
/// theta in [0, pi], phi in [0, 2pi], at fixed depletion delta. Optionally
/// also evaluates the numeric Mzz via the dual search.
std::vector<BecMapRow> run_bec_map(int n_particles, double delta, int grid,
                                   bool with_numeric,
                                   const SearchOptions& opts,
                                   bool serial = false);

/// CSV with header gamma_x,gamma_z,F,M_xx,M_yy,M_zz,M_xz,converged;
/// 12 significant digits.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// CSV with header theta,phi,delta,mzz_expansion,mzz_numeric,exceeds_sql;
/// empty numeric field when not computed.
std::string bec_map_csv(const std::vector<BecMapRow>& rows);

/// printf %.12g, the CSV number format.
std::string format_csv_number(double v);

}  // namespace rdmft
