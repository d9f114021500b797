#include "revlab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace revlab {

EffectivePotential::EffectivePotential(GeneratingCurve curve) : curve_(std::move(curve)) {
  constexpr int kGrid = 1 << 16;
  a0_ = std::numeric_limits<double>::infinity();
  a1_ = 0.0;
  for (int j = 0; j < kGrid; ++j) {
    const double a = curve_.A(curve_.period() * j / kGrid);
    a0_ = std::min(a0_, a);
    a1_ = std::max(a1_, a);
  }
}

double EffectivePotential::v0(double x) const {
  const double a = curve_.A(x);
  return 1.0 / (a * a);
}

Jet EffectivePotential::v0_jet(double x) const {
  const Jet a = curve_.jet(x);
  const double r = 1.0 / a.value;
  const double r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
  return {r2, -2.0 * r3 * a.d1, 6.0 * r4 * a.d1 * a.d1 - 2.0 * r3 * a.d2};
}

double EffectivePotential::v1(double x) const {
  const Jet a = curve_.jet(x);
  const double ra = a.d1 / a.value;
  return 0.5 * a.d2 / a.value - 0.25 * ra * ra;
}

MomentMapSample moment_map_rank(const EffectivePotential& pot, const PhasePoint& pt) {
  const Jet v = pot.v0_jet(pt.x);
  MomentMapSample out;
  out.p = pt.xi * pt.xi + v.value * pt.eta * pt.eta;
  out.q = pt.eta * pt.eta;

  // Columns: d/dx, d/dxi, d/dtheta, d/deta.
  const std::array<double, 4> r1{v.d1 * pt.eta * pt.eta, 2.0 * pt.xi, 0.0, 2.0 * v.value * pt.eta};
  const std::array<double, 4> r2{0.0, 0.0, 0.0, 2.0 * pt.eta};
  auto dot = [](const auto& a, const auto& b) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += a[i] * b[i];
    return s;
  };
  const double n1 = std::sqrt(dot(r1, r1)), n2 = std::sqrt(dot(r2, r2));
  const double scale = std::max(n1, n2);
  constexpr double kTol = 1e-10;
  if (scale == 0.0) return out;
  const bool z1 = n1 <= kTol * scale, z2 = n2 <= kTol * scale;
  if (z1 && z2) return out;
  if (z1 || z2) {
    out.rank = 1;
    return out;
  }
  // Component of r1 orthogonal to r2.
  const double c = dot(r1, r2) / (n2 * n2);
  std::array<double, 4> perp{};
  for (int i = 0; i < 4; ++i) perp[i] = r1[i] - c * r2[i];
  out.rank = std::sqrt(dot(perp, perp)) > kTol * n1 ? 2 : 1;
  return out;
}

void write_moment_map_csv(const EffectivePotential& pot, const std::vector<double>& xs,
                          const std::vector<double>& xis, const std::vector<double>& etas,
                          std::ostream& out) {
  out << "x,xi,eta,p,q,rank\n";
  char buf[200];
  for (double x : xs)
    for (double xi : xis)
      for (double eta : etas) {
        const auto s = moment_map_rank(pot, {x, xi, eta});
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", x, xi, eta, s.p, s.q,
                      s.rank);
        out << buf;
      }
}

}  // namespace revlab
