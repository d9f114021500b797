#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "revlab/profiles.hpp"

namespace revlab {

/// Potentials of the separated operator obtained by conjugating the
/// Laplace-Beltrami operator with multiplication by A^{1/2}:
///   v0 = A^{-2},  v1 = A''/(2A) - (A')^2/(4A^2),  V_h = v0 + h^2 v1.
class EffectivePotential {
 public:
  explicit EffectivePotential(GeneratingCurve curve);

  const GeneratingCurve& curve() const { return curve_; }
  double period() const { return curve_.period(); }

  double v0(double x) const;
  Jet v0_jet(double x) const;
  double v1(double x) const;
  double v_at(double h, double x) const { return v0(x) + h * h * v1(x); }

  /// (min v0, max v0) = (A1^{-2}, A0^{-2}).
  std::pair<double, double> v0_range() const { return {1.0 / (a1_ * a1_), 1.0 / (a0_ * a0_)}; }
  double A0() const { return a0_; }  // min A
  double A1() const { return a1_; }  // max A

 private:
  GeneratingCurve curve_;
  double a0_ = 0.0;
  double a1_ = 0.0;
};

/// Point (x, xi, eta) of T*X with the angle theta quotiented out.
struct PhasePoint {
  double x = 0.0;
  double xi = 0.0;
  double eta = 0.0;
};

struct MomentMapSample {
  double p = 0.0;  // xi^2 + v0(x) eta^2
  double q = 0.0;  // eta^2
  int rank = 0;
};

/// Values and Jacobian rank of M(x, xi, theta, eta) = (xi^2 + v0 eta^2, eta^2).
/// A row counts as dependent when its residual is below 1e-10 of its norm.
MomentMapSample moment_map_rank(const EffectivePotential& pot, const PhasePoint& pt);

/// CSV `x,xi,eta,p,q,rank` over a tensor grid of phase points.
void write_moment_map_csv(const EffectivePotential& pot, const std::vector<double>& xs,
                          const std::vector<double>& xis, const std::vector<double>& etas,
                          std::ostream& out);

}  // namespace revlab
