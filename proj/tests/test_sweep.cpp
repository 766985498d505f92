#include <doctest.h>

#include "rdmft/bec.hpp"
#include "rdmft/sweep.hpp"

using namespace rdmft;

TEST_CASE("smallest grid keeps the four cell centers") {
  SearchOptions opts;
  const auto rows = run_sweep(2, 1.0, 2, Strategy::automatic, opts, true);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].gamma_x == doctest::Approx(-0.5));
  CHECK(rows[0].gamma_z == doctest::Approx(-0.5));
  CHECK(rows[3].gamma_x == doctest::Approx(0.5));
  CHECK(rows[3].gamma_z == doctest::Approx(0.5));
  for (const auto& r : rows) {
    CHECK(r.converged);
    CHECK(std::abs(r.f - closed_form_n2(r.gamma_x, r.gamma_z, 1).f_value) <=
          1e-6);
  }
}

TEST_CASE("grid points outside the disk are dropped") {
  SearchOptions opts;
  const auto rows = run_sweep(2, 1.0, 10, Strategy::automatic, opts, true);
  CHECK(rows.size() < 100);
  for (const auto& r : rows)
    CHECK(std::hypot(r.gamma_x, r.gamma_z) <= 1.0 + 1e-12);
}

TEST_CASE("sweep CSV layout") {
  SearchOptions opts;
  const auto rows = run_sweep(2, 1.0, 2, Strategy::automatic, opts, true);
  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("gamma_x,gamma_z,F,M_xx,M_yy,M_zz,M_xz,converged\n", 0) ==
        0);
  // one header plus one line per row, 8 fields each
  size_t lines = 0, commas = 0;
  for (char c : csv) {
    if (c == '\n') ++lines;
    if (c == ',') ++commas;
  }
  CHECK(lines == rows.size() + 1);
  CHECK(commas == 7 * (rows.size() + 1));
  CHECK(csv.find("-0.5,-0.5,") != std::string::npos);
}

TEST_CASE("number formatting uses 12 significant digits") {
  CHECK(format_csv_number(0.25) == "0.25");
  CHECK(format_csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_csv_number(-2) == "-2");
}

TEST_CASE("serial and parallel sweeps agree bit for bit") {
  SearchOptions opts;
  const auto serial = run_sweep(2, 1.0, 12, Strategy::automatic, opts, true);
  const auto parallel =
      run_sweep(2, 1.0, 12, Strategy::automatic, opts, false);
  REQUIRE(serial.size() == parallel.size());
  CHECK(sweep_csv(serial) == sweep_csv(parallel));
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].f == parallel[i].f);
    CHECK(serial[i].m_zz == parallel[i].m_zz);
  }
}

TEST_CASE("depletion map rows") {
  SearchOptions opts;
  const double pi = 3.14159265358979323846;
  const auto rows = run_bec_map(40, 0.01, 5, false, opts, true);
  REQUIRE(rows.size() == 25);
  CHECK(rows.front().theta == doctest::Approx(0.0));
  CHECK(rows.back().theta == doctest::Approx(pi));
  CHECK(rows.back().phi == doctest::Approx(2.0 * pi));
  for (const auto& r : rows) {
    CHECK(r.mzz_expansion ==
          doctest::Approx(mzz_expansion(40, 0.01, r.theta, r.phi)));
    CHECK_FALSE(r.mzz_numeric.has_value());
    // pole rows carry only the linear depletion term
    if (r.theta == 0.0) CHECK(r.mzz_expansion == doctest::Approx(0.08));
  }

  // zero depletion never exceeds the quantum limit
  const auto flat = run_bec_map(40, 0.0, 7, false, opts, true);
  for (const auto& r : flat) CHECK_FALSE(r.exceeds_sql);

  // numeric column filled when requested
  const auto num = run_bec_map(12, 0.05, 4, true, opts, true);
  int have = 0;
  for (const auto& r : num)
    if (r.mzz_numeric) {
      ++have;
      // fixed-sign series vs minimizing numeric branch: they may differ by
      // up to twice the sqrt-delta cross term, plus truncation slack
      CHECK(std::abs(*r.mzz_numeric - r.mzz_expansion) <=
            4.0 * std::sqrt(0.05 * 12.0 * 11.0) + 1.0);
    }
  CHECK(have > 0);

  const std::string csv = bec_map_csv(num);
  CHECK(csv.rfind("theta,phi,delta,mzz_expansion,mzz_numeric,exceeds_sql\n",
                  0) == 0);
}

TEST_CASE("input validation") {
  SearchOptions opts;
  CHECK_THROWS_AS(run_sweep(2, 1.0, 1, Strategy::automatic, opts, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_bec_map(4, -0.1, 4, false, opts, true),
                  std::invalid_argument);
}
