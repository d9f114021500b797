#include <doctest.h>

#include <cmath>
#include <numbers>

#include "revlab/errors.hpp"
#include "revlab/experiments.hpp"

using namespace revlab;
using std::numbers::pi;

namespace {

const EffectivePotential& flat() {
  static const EffectivePotential p(catalog_profile("flat"));
  return p;
}
const EffectivePotential& nondeg() {
  static const EffectivePotential p(catalog_profile("nondeg"));
  return p;
}

std::vector<BandRegion> default_bands_for_test() {
  return {BandRegion::make(pi - 0.5, pi + 0.5, "barrier", 2 * pi), BandRegion::make(-0.5, 0.5, "well", 2 * pi),
          BandRegion::make(1.0, 2.0, "middle", 2 * pi)};
}

}  // namespace

TEST_CASE("band regions") {
  const BandRegion b = BandRegion::make(5.0, 1.0, "wrap", 2 * pi);
  CHECK(b.hi(2 * pi) == doctest::Approx(1.0 + 2 * pi));
  CHECK(b.length(2 * pi) == doctest::Approx(2 * pi - 4.0));
  CHECK_THROWS_AS(BandRegion::make(1.0, 1.0 + 2 * pi, "x", 2 * pi), InputError);
  CHECK(geometric_ks(10, 40) == std::vector<int>{10, 14, 20, 28, 40});
}

TEST_CASE("flat torus: constant mode mass is the band fraction") {
  const auto modes = modes_for_k(flat(), 0, -1.0, 0.5, Grid::make(128, 2 * pi));
  REQUIRE(modes.size() == 1);
  const BandRegion b = BandRegion::make(0.3, 1.7, "b", 2 * pi);
  for (Measure m : {Measure::Flat, Measure::Volume})
    CHECK(band_mass(modes[0], b, m, flat()) == doctest::Approx(1.4 / (2 * pi)).epsilon(1e-12));
}

TEST_CASE("band masses add over a partition") {
  const auto modes = modes_for_k(nondeg(), 3, 0.0, 100.0, Grid::make(256, 2 * pi));
  REQUIRE(modes.size() >= 4);
  for (const auto& mode : modes) {
    for (Measure m : {Measure::Flat, Measure::Volume}) {
      const double s = band_mass(mode, BandRegion::make(0.0, 1.0, "", 2 * pi), m, nondeg()) +
                       band_mass(mode, BandRegion::make(1.0, 4.321, "", 2 * pi), m, nondeg()) +
                       band_mass(mode, BandRegion::make(4.321, 2 * pi, "", 2 * pi), m, nondeg());
      CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
      const double w = band_mass(mode, BandRegion::make(4.321, 1.0, "", 2 * pi), m, nondeg()) +
                       band_mass(mode, BandRegion::make(1.0, 4.321, "", 2 * pi), m, nondeg());
      CHECK(w == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("short bands are rejected") {
  const auto modes = modes_for_k(flat(), 0, -1.0, 0.5, Grid::make(64, 2 * pi));
  CHECK_THROWS_AS(band_mass(modes[0], BandRegion::make(1.0, 1.2, "", 2 * pi), Measure::Flat, flat()),
                  InputError);
}

TEST_CASE("large-k ground mode is exponentially small under the barrier") {
  const auto modes = modes_for_k(nondeg(), 60, -1.0, 1e6, Grid::make(512, 2 * pi));
  REQUIRE(!modes.empty());
  const SurfaceMode& g = modes.front();
  const BandRegion barrier = BandRegion::make(pi - 0.5, pi + 0.5, "barrier", 2 * pi);
  CHECK(band_mass(g, barrier, Measure::Flat, nondeg()) <= std::pow(g.lambda(), -10));
  const auto wf = wavefront_proxy(g, barrier, nondeg());
  CHECK(wf.value == 0.0);
  CHECK_FALSE(wf.meets);
}

TEST_CASE("flat barrier family: masses are constant, gamma = 0, PASS") {
  const auto fam = barrier_family(flat(), 1.0, geometric_ks(10, 160), Grid::make(512, 2 * pi), 1e3);
  REQUIRE(fam.members.size() == 9);
  const BandRegion band = BandRegion::make(1.0, 2.0, "middle", 2 * pi);
  const MassFit f = mass_rate_fit(fam, band, flat());
  CHECK(std::abs(f.fit.exponent) <= 1e-6);
  CHECK_FALSE(f.vacuous);
  const DichotomyReport rep = dichotomy_report(fam, band, flat());
  CHECK(rep.branch == Branch::LowerBounded);
  CHECK(rep.verdict == Verdict::Pass);
  REQUIRE(rep.delta_hat);
  CHECK(*rep.delta_hat == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.wavefront_meets_band);
}

TEST_CASE("uniform mass check on the flat k = 0 family") {
  const auto fam = fixed_k_family(flat(), 0, 2.5, 30.5, Grid::make(256, 2 * pi));
  CHECK(fam.members.size() == 56);
  const auto r = uniform_mass_check(fam, BandRegion::make(1.0, 2.0, "", 2 * pi), flat());
  CHECK(r.pass);
  CHECK(r.min_mass >= 0.1);
  CHECK(r.ratio <= 3.0);

  const auto fam5 = fixed_k_family(flat(), 5, 6.0, 10.0, Grid::make(256, 2 * pi));
  CHECK_THROWS_AS(uniform_mass_check(fam5, BandRegion::make(1.0, 2.0, "", 2 * pi), flat()), InputError);
}

TEST_CASE("nondeg well family vanishes under the barrier") {
  const auto fam = well_family(nondeg(), geometric_ks(30, 240), Grid::make(512, 2 * pi), 300.0);
  REQUIRE(fam.members.size() == 7);
  const auto rep = dichotomy_report(fam, BandRegion::make(pi - 0.5, pi + 0.5, "barrier", 2 * pi), nondeg());
  CHECK(rep.branch == Branch::Vanishing);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK_FALSE(rep.gamma_fit.has_value());
}

TEST_CASE("gamma is robust to the choice of measure") {
  const auto fam = fixed_k_family(nondeg(), 1, 10.0, 100.0, Grid::make(1024, 2 * pi));
  const auto rep = dichotomy_report(fam, BandRegion::make(1.0, 2.0, "middle", 2 * pi), nondeg());
  REQUIRE(rep.branch == Branch::LowerBounded);
  REQUIRE(rep.gamma_fit);
  REQUIRE(rep.gamma_volume);
  CHECK(std::abs(rep.gamma_fit->exponent - *rep.gamma_volume) <= 0.02);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(!rep.gamma_trend.empty());
}

TEST_CASE("dichotomy report is total") {
  const Grid g = Grid::make(256, 2 * pi);
  const auto els = classify_profile(nondeg());
  const auto fams = standard_families(nondeg(), els, g, 10.0, 60.0);
  CHECK(fams.size() == 4);
  for (const auto& fam : fams) {
    for (const auto& band : default_bands_for_test()) {
      const auto rep = dichotomy_report(fam, band, nondeg());
      switch (rep.branch) {
        case Branch::Vanishing: CHECK(rep.verdict == Verdict::Pass); break;
        case Branch::LowerBounded: CHECK(rep.verdict != Verdict::Inconclusive); break;
        case Branch::Inconclusive: CHECK(rep.verdict == Verdict::Inconclusive); break;
      }
      CHECK(rep.lambdas.size() == fam.members.size());
    }
  }
  const ModeFamily empty{"none", {}};
  CHECK(dichotomy_report(empty, BandRegion::make(1.0, 2.0, "", 2 * pi), nondeg()).branch == Branch::Inconclusive);
  CHECK_THROWS_AS(mass_rate_fit(empty, BandRegion::make(1.0, 2.0, "", 2 * pi), nondeg()), InputError);
}
