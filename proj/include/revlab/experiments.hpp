#pragma once

#include <optional>
#include <string>
#include <vector>

#include "revlab/microlocal.hpp"

namespace revlab {

/// Band (a, b) x S^1 on the surface; b < a wraps through the period.
struct BandRegion {
  double a = 0.0;
  double b = 0.0;
  std::string label;

  /// Throws InputError when a == b modulo the period.
  static BandRegion make(double a, double b, std::string label, double period);
  /// Upper endpoint unwrapped so that a < hi <= a + period.
  double hi(double period) const;
  double length(double period) const { return hi(period) - a; }
};

enum class Measure { Flat, Volume };
std::string to_string(Measure m);

/// Fraction of the mode's mass in the band. Volume measure: |phi|^2 dx (the
/// conjugation by A^{1/2} is an isometry onto A dx dtheta). Flat measure:
/// |phi|^2 / A dx, i.e. |u|^2 dx dtheta. Trapezoid rule on the piecewise
/// linear interpolant, so masses over a partition of the circle add to 1.
/// Throws InputError for bands shorter than 4 grid cells.
double band_mass(const SurfaceMode& mode, const BandRegion& band, Measure measure,
                 const EffectivePotential& pot);

struct ModeFamily {
  std::string selector;
  std::vector<SurfaceMode> members;  // ascending lambda
};

/// Ground mode of P_k for each k, kept when lambda <= lambda_max.
ModeFamily well_family(const EffectivePotential& pot, const std::vector<int>& ks,
                       const Grid& grid, double lambda_max);
/// For each k the mode with lambda^2 nearest k^2 * level, kept when lambda <= lambda_max.
ModeFamily barrier_family(const EffectivePotential& pot, double level, const std::vector<int>& ks,
                          const Grid& grid, double lambda_max);
/// All modes of P_k with lambda in [lambda_lo, lambda_hi]; lambda = 0 excluded.
ModeFamily fixed_k_family(const EffectivePotential& pot, int k, double lambda_lo,
                          double lambda_hi, const Grid& grid);

/// Families used by the dichotomy front end: ground modes of P_k when V0 has a
/// weakly stable minimum, one barrier family per weakly unstable level, and
/// the k = 0 and k = 1 families, all within [lambda_min, lambda_max].
std::vector<ModeFamily> standard_families(const EffectivePotential& pot,
                                          const std::vector<CriticalElement>& elements,
                                          const Grid& grid, double lambda_min, double lambda_max);

/// Geometric list of distinct integers from lo to hi with ratio sqrt(2).
std::vector<int> geometric_ks(int lo, int hi);

/// Windowed-Fourier mass of phi over the band at classically allowed
/// frequencies |xi| <= sqrt(max_band(lambda^2 - k^2 v0)) + 2 * 2pi/(b - a),
/// relative to the total mass. Zero when the band is classically forbidden.
struct WavefrontProxy {
  double value = 0.0;
  bool meets = false;
};
WavefrontProxy wavefront_proxy(const SurfaceMode& mode, const BandRegion& band,
                               const EffectivePotential& pot, double threshold = 1e-4);

/// gamma in mass ~ lambda^{-gamma}; exponent field of the RateFit holds gamma.
struct MassFit {
  RateFit fit;
  bool vacuous = false;  // some member's wavefront proxy misses the band
};
/// Requires >= 5 members spanning a lambda factor >= 4.
MassFit mass_rate_fit(const ModeFamily& family, const BandRegion& band,
                      const EffectivePotential& pot, Measure measure = Measure::Flat,
                      double wavefront_threshold = 1e-4);

struct UniformMassResult {
  double min_mass = 0.0;
  double max_mass = 0.0;
  double ratio = 0.0;
  bool pass = false;  // ratio <= bound
};
/// Members must all be psi0-class; throws InputError otherwise or when empty.
UniformMassResult uniform_mass_check(const ModeFamily& family, const BandRegion& band,
                                     const EffectivePotential& pot, double ratio_bound = 10.0);

enum class Branch { Vanishing, LowerBounded, Inconclusive };
enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Branch b);
std::string to_string(Verdict v);

struct DichotomyOptions {
  int vanishing_degree = 6;  // N0: vanishing means mass <= lambda^-N0
  double eps_accept = 0.2;
  double wavefront_threshold = 1e-4;
};

struct DichotomyReport {
  BandRegion band;
  std::string family;
  Branch branch = Branch::Inconclusive;
  std::optional<RateFit> gamma_fit;     // flat measure
  std::optional<double> gamma_volume;   // same fit in the volume measure
  std::optional<double> delta_hat;      // 1 - gamma
  std::vector<double> gamma_trend;      // gamma over growing lambda prefixes
  bool wavefront_meets_band = false;    // every member passes the proxy
  double wavefront_min = 0.0;
  double wavefront_max = 0.0;
  std::vector<int> ks;
  std::vector<double> lambdas;
  std::vector<double> masses;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

DichotomyReport dichotomy_report(const ModeFamily& family, const BandRegion& band,
                                 const EffectivePotential& pot, const DichotomyOptions& opts = {});

}  // namespace revlab
