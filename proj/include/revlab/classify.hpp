#pragma once

#include <optional>
#include <string>
#include <vector>

#include "revlab/geometry.hpp"

namespace revlab {

enum class Taxonomy {
  NondegenerateMax,
  FiniteDegenerateMax,
  InflectionTransmission,
  InfinitelyDegenerateMax,
  CylinderMax,
  CylinderInflection,
  WeaklyStableMin,
  GlobalCylinder,
};

std::string to_string(Taxonomy t);

/// Vanishing order of V0 - level at a critical point: the leading power k of
/// the local Taylor behaviour, or infinite when it exceeds the probed maximum.
struct VanishingOrder {
  std::optional<int> k;  // nullopt = beyond max order (numerically flat)
  bool infinite() const { return !k.has_value(); }
};

/// Maximal connected set of critical points of V0 at one level.
struct CriticalElement {
  Interval interval;  // lo == hi for an isolated point
  double level = 0.0;
  bool isolated = true;
  VanishingOrder vanishing;
  Taxonomy taxonomy = Taxonomy::WeaklyStableMin;
  int order = 0;  // m for maxima, m2 for inflections, 0 if not applicable
  int left_sign = 0;   // sign of V0' just left of the element
  int right_sign = 0;  // sign of V0' just right of the element
  bool classified = false;
};

struct CriticalValueSet {
  std::vector<double> values;
  std::vector<int> components_per_value;
  bool finite = true;
};

struct CriticalScan {
  std::vector<CriticalElement> elements;  // stubs: interval and level only
  CriticalValueSet values;
};

struct CriticalScanOptions {
  int grid_size = 1 << 12;
  double tol = 1e-8;  // relative to max |V0'|
  int cap = 64;
};

/// Locates maximal critical intervals of V0 on the base circle. A constant
/// profile yields a single GlobalCylinder element covering the circle.
CriticalScan find_critical_intervals(const EffectivePotential& pot,
                                     const CriticalScanOptions& opts = {});

/// Leading power of V0(x0 +- d) - V0(x0) estimated from dyadic deviation
/// ratios; infinite when the local slope exceeds max_order (<= 10).
VanishingOrder vanishing_order(const EffectivePotential& pot, double x0, int max_order = 10,
                               double tol = 1e-8);

/// Assigns the taxonomy from side signs, isolation and vanishing order.
CriticalElement classify_element(const EffectivePotential& pot, const CriticalElement& stub,
                                 const VanishingOrder& order, double scan_radius);

/// Convenience: scan, order and classify every element.
std::vector<CriticalElement> classify_profile(const EffectivePotential& pot,
                                              const CriticalScanOptions& opts = {},
                                              int max_order = 10);

/// Exponent alpha in the lower bound h^alpha on the microlocalized operator.
struct PredictedExponent {
  int num = 0;
  int den = 1;
  bool log_corrected = false;  // h / log(1/h)
  bool eta_slack = false;      // h^{2 + eta} for every eta > 0
  double value() const { return static_cast<double>(num) / den; }
  std::string to_string() const;
};

/// nullopt for weakly stable minima and for a globally constant V0, where
/// the constant mode is an exact kernel of P(level, h) and no rate exists.
std::optional<PredictedExponent> predicted_exponent(const CriticalElement& elem);

bool weakly_unstable(const CriticalElement& elem);

}  // namespace revlab
