#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "revlab/fourier.hpp"

using namespace revlab;
using std::numbers::pi;

TEST_CASE("fft round trip and unnormalized forward") {
  const int n = 64;
  std::vector<cplx> x(n), X(n), back(n);
  for (int j = 0; j < n; ++j) x[j] = cplx(std::sin(0.3 * j), std::cos(1.7 * j * j));
  Fft fft(n);
  fft.forward(x, X);
  // Direct DFT oracle for a few bins.
  for (int k : {0, 1, 5, 31, 32, 63}) {
    cplx s{};
    for (int m = 0; m < n; ++m) s += x[m] * std::polar(1.0, -2.0 * pi * k * m / n);
    CHECK(std::abs(s - X[k]) < 1e-11);
  }
  fft.inverse(X, back);
  for (int j = 0; j < n; ++j) CHECK(std::abs(back[j] - x[j]) < 1e-13);
}

TEST_CASE("wavenumber layout") {
  CHECK(wavenumber(0, 8) == 0);
  CHECK(wavenumber(3, 8) == 3);
  CHECK(wavenumber(4, 8) == 4);
  CHECK(wavenumber(5, 8) == -3);
  CHECK(wavenumber(7, 8) == -1);
}

TEST_CASE("spectral derivatives of a trigonometric polynomial are exact") {
  const int n = 128;
  const double L = 3.0;
  const double w = 2.0 * pi / L;
  std::vector<double> f(n);
  for (int j = 0; j < n; ++j) {
    const double x = L * j / n;
    f[j] = std::sin(3 * w * x) + 0.5 * std::cos(7 * w * x);
  }
  const auto d = spectral_derivatives(f, L);
  for (int j = 0; j < n; ++j) {
    const double x = L * j / n;
    CHECK(d.df[j] == doctest::Approx(3 * w * std::cos(3 * w * x) - 3.5 * w * std::sin(7 * w * x)).epsilon(1e-10));
    CHECK(d.d2f[j] ==
          doctest::Approx(-9 * w * w * std::sin(3 * w * x) - 24.5 * w * w * std::cos(7 * w * x)).epsilon(1e-10));
  }
}

TEST_CASE("trigonometric interpolant reproduces off-grid values and derivatives") {
  const int n = 64;
  std::vector<double> f(n);
  auto g = [](double x) { return 2.0 + std::cos(x) + 0.25 * std::sin(5 * x); };
  for (int j = 0; j < n; ++j) f[j] = g(2 * pi * j / n);
  TrigInterpolant t(f, 2 * pi);
  for (double x : {0.01, 0.77, 2.5, 4.0001, 6.2}) {
    const auto v = t.eval(x);
    CHECK(v[0] == doctest::Approx(g(x)).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(-std::sin(x) + 1.25 * std::cos(5 * x)).epsilon(1e-11));
    CHECK(v[2] == doctest::Approx(-std::cos(x) - 6.25 * std::sin(5 * x)).epsilon(1e-10));
  }
  // Periodicity.
  CHECK(t.eval(1.3)[0] == doctest::Approx(t.eval(1.3 + 2 * pi)[0]).epsilon(1e-12));
}
