#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "revlab/errors.hpp"
#include "revlab/profiles.hpp"

using namespace revlab;
using std::numbers::pi;

TEST_CASE("every catalog profile validates") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const GeneratingCurve c = catalog_profile(name);
    const CurveValidation v = validate(c);
    CHECK(v.ok);
    CHECK(v.min_A > 0.0);
    CHECK(v.periodicity_error <= 1e-12);
    CHECK(c.period() == doctest::Approx(2 * pi));
  }
  for (int m = 2; m <= 5; ++m) CHECK(validate(catalog_profile("power-max", {{"m", m}})).ok);
  for (int m2 = 1; m2 <= 3; ++m2) CHECK(validate(catalog_profile("inflection", {{"m2", m2}})).ok);
  CHECK(validate(catalog_profile("gevrey-flat", {{"p", 1}})).ok);
  CHECK(validate(catalog_profile("cylinder", {{"a", 1.0}, {"p", 1.5}})).ok);
}

TEST_CASE("catalog closed forms") {
  // nondeg: A = 2 + cos x.
  const GeneratingCurve nd = catalog_profile("nondeg");
  for (double x : {0.0, 1.0, pi, 5.0}) {
    const Jet a = nd.jet(x);
    CHECK(a.value == doctest::Approx(2 + std::cos(x)));
    CHECK(a.d1 == doctest::Approx(-std::sin(x)));
    CHECK(a.d2 == doctest::Approx(-std::cos(x)));
  }
  // power-max: V0 = A^-2 = 1 - 3/4 sin^{2m}(x/2).
  const GeneratingCurve pm = catalog_profile("power-max", {{"m", 3}});
  for (double x : {0.2, 1.0, pi, 4.0}) {
    const double a = pm.A(x);
    CHECK(1.0 / (a * a) == doctest::Approx(1.0 - 0.75 * std::pow(std::sin(x / 2), 6)).epsilon(1e-13));
  }
  const GeneratingCurve fl = catalog_profile("flat");
  CHECK(fl.A(1.234) == 1.0);
  REQUIRE(fl.flat_pieces().has_value());
  CHECK(fl.flat_pieces()->size() == 1);
  const GeneratingCurve cyl = catalog_profile("cylinder");
  REQUIRE(cyl.flat_pieces().has_value());
  CHECK((*cyl.flat_pieces())[0].lo == doctest::Approx(-0.5));
  CHECK((*cyl.flat_pieces())[0].hi == doctest::Approx(0.5));
  // Exactly constant on the flat piece.
  CHECK(cyl.A(0.3) == cyl.A(-0.45));
  CHECK(cyl.jet(0.2).d1 == 0.0);
  CHECK(catalog_profile("nondeg").flat_pieces()->empty());
}

TEST_CASE("catalog rejects bad parameters") {
  CHECK_THROWS_AS(catalog_profile("power-max", {{"m", 1}}), InputError);
  CHECK_THROWS_AS(catalog_profile("power-max", {{"m", 2.5}}), InputError);
  CHECK_THROWS_AS(catalog_profile("inflection", {{"m2", 0}}), InputError);
  CHECK_THROWS_AS(catalog_profile("cylinder", {{"a", 2.0}}), InputError);
  CHECK_THROWS_AS(catalog_profile("gevrey-flat", {{"p", 0.5}}), InputError);
  CHECK_THROWS_AS(catalog_profile("nondeg", {{"m", 2}}), InputError);
  CHECK_THROWS_AS(catalog_profile("torus"), InputError);
  CHECK_THROWS_AS(catalog_profile("flat", {{"period", 3.0}}), InputError);
}

TEST_CASE("profile spec text round-trips") {
  const ProfileSpec specs[] = {
      {"power-max", {{"m", 3}}, 2 * pi},
      {"cylinder", {{"a", 0.1 + 0.2}, {"p", 1.0 / 3.0}}, 2 * pi},
      {"flat", {}, 2 * pi},
      {"gevrey-flat", {{"p", 1e-300 + 2.0}}, 7.125},
  };
  for (const auto& s : specs) {
    CAPTURE(s.to_text());
    CHECK(ProfileSpec::parse(s.to_text()) == s);
  }
  CHECK(ProfileSpec::parse("nondeg").period == doctest::Approx(2 * pi));
  CHECK_THROWS_AS(ProfileSpec::parse(""), InputError);
  CHECK_THROWS_AS(ProfileSpec::parse("power-max m"), InputError);
  CHECK_THROWS_AS(ProfileSpec::parse("power-max m=two"), InputError);
  // The spec stored on a catalog curve reproduces the same curve.
  const GeneratingCurve c = catalog_profile("power-max", {{"m", 4}});
  REQUIRE(c.spec().has_value());
  const GeneratingCurve d = catalog_profile(ProfileSpec::parse(c.spec()->to_text()));
  for (double x : {0.1, 2.0, 5.5}) CHECK(c.A(x) == d.A(x));
}

TEST_CASE("construct_from_v0 chain rule against finite differences") {
  auto v0 = [](double x) { return Jet{1.0 + 0.3 * std::sin(x), 0.3 * std::cos(x), -0.3 * std::sin(x)}; };
  const GeneratingCurve c = construct_from_v0(v0, 2 * pi);
  const double e = 1e-4;
  for (double x : {0.3, 1.9, 4.4}) {
    auto A = [](double y) { return 1.0 / std::sqrt(1.0 + 0.3 * std::sin(y)); };
    CHECK(c.A(x) == doctest::Approx(A(x)).epsilon(1e-14));
    CHECK(c.jet(x).d1 == doctest::Approx((A(x + e) - A(x - e)) / (2 * e)).epsilon(1e-7));
    CHECK(c.jet(x).d2 == doctest::Approx((A(x + e) - 2 * A(x) + A(x - e)) / (e * e)).epsilon(1e-5));
  }
}

TEST_CASE("construct_from_v0 rejects non-positive and non-periodic input") {
  try {
    construct_from_v0([](double x) { return Jet{std::cos(x), -std::sin(x), -std::cos(x)}; }, 2 * pi);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("v0(") != std::string::npos);
  }
  CHECK_THROWS_AS(construct_from_v0([](double x) { return Jet{2.0 + std::sin(x), std::cos(x), -std::sin(x)}; }, 5.0),
                  InputError);
  CHECK_THROWS_AS(construct_from_v0(std::function<double(double)>([](double x) { return x - 1.0; }), 2 * pi),
                  InputError);
}

TEST_CASE("values-only construction uses spectral derivatives") {
  const GeneratingCurve c =
      construct_from_v0(std::function<double(double)>([](double x) { return 1.0 / std::pow(2 + std::cos(x), 2); }),
                        2 * pi, 256);
  CHECK(c.kind() == CurveKind::Sampled);
  for (double x : {0.0, 0.7, 3.0}) {
    CHECK(c.A(x) == doctest::Approx(2 + std::cos(x)).epsilon(1e-10));
    CHECK(c.jet(x).d1 == doctest::Approx(-std::sin(x)).epsilon(1e-8));
  }
}

TEST_CASE("gevrey flat model and its derivatives") {
  for (double p : {1.0, 2.0, 3.5}) {
    CAPTURE(p);
    CHECK(gevrey_flat_model(0.0, p).value == 0.0);
    CHECK(gevrey_flat_model(-1.0, p).d1 == 0.0);
    const double e = 1e-5;
    for (double t : {0.3, 0.7, 1.5}) {
      const Jet j = gevrey_flat_model(t, p);
      CHECK(j.value == doctest::Approx(std::exp(-std::pow(t, -p))));
      const double fd1 = (gevrey_flat_model(t + e, p).value - gevrey_flat_model(t - e, p).value) / (2 * e);
      const double fd2 = (gevrey_flat_model(t + e, p).d1 - gevrey_flat_model(t - e, p).d1) / (2 * e);
      CHECK(j.d1 == doctest::Approx(fd1).epsilon(1e-7));
      CHECK(j.d2 == doctest::Approx(fd2).epsilon(1e-7));
    }
  }
  // Underflow region returns exact zero without NaN.
  const Jet tiny = gevrey_flat_model(1e-3, 2.0);
  CHECK(tiny.value == 0.0);
  CHECK(tiny.d2 == 0.0);
}

TEST_CASE("sampled curve and csv round trip") {
  const GeneratingCurve nd = catalog_profile("nondeg");
  std::stringstream buf;
  write_curve_csv(nd, 128, buf);
  const GeneratingCurve back = read_curve_csv(buf);
  CHECK(back.kind() == CurveKind::Sampled);
  CHECK(back.period() == doctest::Approx(2 * pi).epsilon(1e-14));
  for (double x : {0.05, 1.0, 3.3}) {
    CHECK(back.A(x) == doctest::Approx(nd.A(x)).epsilon(1e-12));
    CHECK(back.jet(x).d2 == doctest::Approx(nd.jet(x).d2).epsilon(1e-9));
  }
  CHECK_FALSE(back.flat_pieces().has_value());

  std::stringstream bad("x,A\n0,1\n");
  CHECK_THROWS_AS(read_curve_csv(bad), InputError);
  std::stringstream neg;
  neg << "x,A\n";
  for (int j = 0; j < 32; ++j) neg << j * 0.1 << "," << (j == 7 ? -1.0 : 1.0) << "\n";
  CHECK_THROWS_AS(read_curve_csv(neg), InputError);
  CHECK_THROWS_AS(sampled_curve({1, 2, 3}, 1.0), InputError);
}

TEST_CASE("epsilon floor sits below min A") {
  const GeneratingCurve nd = catalog_profile("nondeg");
  CHECK(nd.epsilon_floor() < 1.0);
  CHECK(nd.epsilon_floor() > 0.99);
}
