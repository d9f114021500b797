#include <doctest.h>

#include <cmath>
#include <numbers>

#include "revlab/classify.hpp"
#include "revlab/errors.hpp"

using namespace revlab;
using std::numbers::pi;

namespace {

EffectivePotential from_v0(std::function<Jet(double)> v0) {
  return EffectivePotential(construct_from_v0(std::move(v0), 2 * pi, CurveKind::ClosedForm,
                                              std::vector<Interval>{}));
}

// Wrapped distance on the circle.
double circ(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2 * pi);
  return std::min(d, 2 * pi - d);
}

const CriticalElement* at(const std::vector<CriticalElement>& els, double x) {
  for (const auto& e : els)
    if (circ(e.interval.center(), x) < 1e-6) return &e;
  return nullptr;
}

}  // namespace

TEST_CASE("catalog classification table") {
  SUBCASE("flat") {
    const auto els = classify_profile(EffectivePotential(catalog_profile("flat")));
    REQUIRE(els.size() == 1);
    CHECK(els[0].taxonomy == Taxonomy::GlobalCylinder);
    CHECK_FALSE(predicted_exponent(els[0]).has_value());
    CHECK(weakly_unstable(els[0]));
  }
  SUBCASE("nondeg") {
    const auto els = classify_profile(EffectivePotential(catalog_profile("nondeg")));
    REQUIRE(els.size() == 2);
    const auto* mx = at(els, pi);
    const auto* mn = at(els, 0.0);
    REQUIRE(mx);
    REQUIRE(mn);
    CHECK(mx->taxonomy == Taxonomy::NondegenerateMax);
    CHECK(mx->level == doctest::Approx(1.0));
    CHECK(mn->taxonomy == Taxonomy::WeaklyStableMin);
    CHECK(mn->level == doctest::Approx(1.0 / 9.0));
    const auto p = predicted_exponent(*mx);
    REQUIRE(p);
    CHECK(p->value() == 1.0);
    CHECK(p->log_corrected);
    CHECK_FALSE(predicted_exponent(*mn).has_value());
  }
  SUBCASE("power-max") {
    for (int m = 2; m <= 5; ++m) {
      CAPTURE(m);
      const auto els = classify_profile(EffectivePotential(catalog_profile("power-max", {{"m", m}})));
      REQUIRE(els.size() == 2);
      const auto* mx = at(els, 0.0);
      REQUIRE(mx);
      CHECK(mx->taxonomy == Taxonomy::FiniteDegenerateMax);
      CHECK(mx->order == m);
      REQUIRE(mx->vanishing.k);
      CHECK(*mx->vanishing.k == 2 * m);
      CHECK(predicted_exponent(*mx)->value() == doctest::Approx(2.0 * m / (m + 1)));
      CHECK(at(els, pi)->taxonomy == Taxonomy::WeaklyStableMin);
    }
  }
  SUBCASE("inflection") {
    for (int m2 = 1; m2 <= 3; ++m2) {
      CAPTURE(m2);
      const auto els = classify_profile(EffectivePotential(catalog_profile("inflection", {{"m2", m2}})));
      REQUIRE(els.size() == 4);
      for (double x : {0.0, pi}) {
        const auto* e = at(els, x);
        REQUIRE(e);
        CHECK(e->taxonomy == Taxonomy::InflectionTransmission);
        CHECK(e->order == m2);
        CHECK(predicted_exponent(*e)->value() == doctest::Approx((4.0 * m2 + 2) / (2.0 * m2 + 3)));
      }
      CHECK(at(els, pi / 2)->taxonomy == Taxonomy::WeaklyStableMin);
      CHECK(at(els, 3 * pi / 2)->taxonomy == Taxonomy::NondegenerateMax);
    }
  }
  SUBCASE("cylinder") {
    const auto els = classify_profile(EffectivePotential(catalog_profile("cylinder")));
    REQUIRE(els.size() == 2);
    const auto& c = els[0].isolated ? els[1] : els[0];
    CHECK(c.taxonomy == Taxonomy::CylinderMax);
    CHECK_FALSE(c.isolated);
    const double cell = 2 * pi / 4096;
    CHECK(std::abs(c.interval.lo + 0.5) <= 2 * cell);
    CHECK(std::abs(c.interval.hi - 0.5) <= 2 * cell);
    const auto p = predicted_exponent(c);
    REQUIRE(p);
    CHECK(p->eta_slack);
    CHECK(p->value() == 2.0);
  }
  SUBCASE("gevrey-flat") {
    for (double p : {1.0, 2.0}) {
      const auto els = classify_profile(EffectivePotential(catalog_profile("gevrey-flat", {{"p", p}})));
      const auto* e = at(els, 0.0);
      REQUIRE(e);
      CHECK(e->taxonomy == Taxonomy::InfinitelyDegenerateMax);
      CHECK(e->isolated);
      CHECK(e->vanishing.infinite());
      CHECK(predicted_exponent(*e)->eta_slack);
    }
  }
}

TEST_CASE("vanishing order of synthetic power laws") {
  // V0 = 2 - sin^k(x)/2 style profiles, critical at x = 0.
  for (int k = 2; k <= 8; ++k) {
    CAPTURE(k);
    const auto pot = from_v0([k](double x) {
      const double s = std::sin(x), c = std::cos(x);
      const double sk = std::pow(s, k);
      const double d1 = k * std::pow(s, k - 1) * c;
      const double d2 = k * (k - 1) * std::pow(s, k - 2) * c * c - k * sk;
      return Jet{2.0 + 0.5 * sk, 0.5 * d1, 0.5 * d2};
    });
    const VanishingOrder v = vanishing_order(pot, 0.0);
    REQUIRE(v.k.has_value());
    CHECK(*v.k == k);
  }
}

TEST_CASE("vanishing order rejects a non-critical point") {
  const EffectivePotential pot(catalog_profile("nondeg"));
  CHECK_THROWS_AS(vanishing_order(pot, 1.0), ClassificationError);
}

TEST_CASE("exceeding the critical cap marks the set infinite") {
  const auto pot = from_v0([](double x) {
    return Jet{1.0 + 0.1 * std::cos(40 * x), -4.0 * std::sin(40 * x), -160.0 * std::cos(40 * x)};
  });
  CriticalScanOptions opts;
  opts.cap = 16;
  const CriticalScan scan = find_critical_intervals(pot, opts);
  CHECK(scan.elements.size() == 80);
  CHECK_FALSE(scan.values.finite);
  CHECK_THROWS_AS(classify_profile(pot, opts), ClassificationError);
  opts.cap = 100;
  const CriticalScan ok = find_critical_intervals(pot, opts);
  CHECK(ok.values.finite);
  CHECK(ok.values.values.size() == 2);
}

TEST_CASE("predicted exponent text and reduction") {
  CriticalElement e;
  e.taxonomy = Taxonomy::FiniteDegenerateMax;
  e.order = 3;
  const auto p = predicted_exponent(e);
  REQUIRE(p);
  CHECK(p->num == 3);
  CHECK(p->den == 2);
  e.taxonomy = Taxonomy::InflectionTransmission;
  e.order = 2;
  CHECK(predicted_exponent(e)->to_string() == "10/7");
  e.taxonomy = Taxonomy::WeaklyStableMin;
  CHECK_FALSE(weakly_unstable(e));
}

TEST_CASE("every element of the catalog gets a taxonomy") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    for (const auto& e : classify_profile(EffectivePotential(catalog_profile(name)))) CHECK(e.classified);
  }
}
