#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "revlab/geometry.hpp"

using namespace revlab;
using std::numbers::pi;

TEST_CASE("effective potentials of the nondegenerate profile") {
  const EffectivePotential pot(catalog_profile("nondeg"));
  for (double x : {0.0, 0.9, pi, 5.1}) {
    const double A = 2 + std::cos(x), Ap = -std::sin(x), App = -std::cos(x);
    CHECK(pot.v0(x) == doctest::Approx(1 / (A * A)));
    CHECK(pot.v1(x) == doctest::Approx(0.5 * App / A - 0.25 * Ap * Ap / (A * A)));
    // v0' and v0'' against central differences of v0.
    const double e = 1e-4;
    const Jet j = pot.v0_jet(x);
    CHECK(j.d1 == doctest::Approx((pot.v0(x + e) - pot.v0(x - e)) / (2 * e)).epsilon(1e-7));
    CHECK(j.d2 == doctest::Approx((pot.v0(x + e) - 2 * pot.v0(x) + pot.v0(x - e)) / (e * e)).epsilon(1e-5));
    CHECK(pot.v_at(0.1, x) == doctest::Approx(pot.v0(x) + 0.01 * pot.v1(x)));
  }
  CHECK(pot.A0() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pot.A1() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(pot.v0_range().first == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
  CHECK(pot.v0_range().second == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flat profile has v0 = 1 and v1 = 0") {
  const EffectivePotential pot(catalog_profile("flat"));
  CHECK(pot.v0(2.0) == 1.0);
  CHECK(pot.v1(2.0) == 0.0);
}

TEST_CASE("moment map rank") {
  const EffectivePotential pot(catalog_profile("nondeg"));
  // Generic point: rank 2.
  MomentMapSample s = moment_map_rank(pot, {0.7, 0.4, 1.3});
  CHECK(s.rank == 2);
  CHECK(s.p == doctest::Approx(0.16 + pot.v0(0.7) * 1.69));
  CHECK(s.q == doctest::Approx(1.69));
  // Latitudinal critical point with xi = 0: rows become parallel.
  CHECK(moment_map_rank(pot, {pi, 0.0, 1.0}).rank == 1);
  CHECK(moment_map_rank(pot, {0.0, 0.0, 2.0}).rank == 1);
  // Away from critical x with xi = 0 the x-derivative separates the rows.
  CHECK(moment_map_rank(pot, {1.0, 0.0, 1.0}).rank == 2);
  // eta = 0: second row vanishes.
  CHECK(moment_map_rank(pot, {1.0, 0.5, 0.0}).rank == 1);
  CHECK(moment_map_rank(pot, {1.0, 0.0, 0.0}).rank == 0);
}

TEST_CASE("moment map csv") {
  const EffectivePotential pot(catalog_profile("nondeg"));
  std::ostringstream out;
  write_moment_map_csv(pot, {0.0, 1.0}, {0.0, 0.5}, {1.0}, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,xi,eta,p,q,rank");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}
