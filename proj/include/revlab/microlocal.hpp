#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revlab/classify.hpp"
#include "revlab/spectral.hpp"

namespace revlab {

/// Tensor-product window in (x, xi) with xi the semiclassical frequency hD.
/// Each factor is 1 on the inner (1 - taper) part of its halfwidth and
/// falls to 0 at the halfwidth with a raised cosine.
struct PhaseSpaceWindow {
  double x_center = 0.0;
  double x_halfwidth = 1.0;
  double xi_center = 0.0;
  double xi_halfwidth = 0.5;
  double taper = 0.25;

  /// Covers the whole phase space: the compression is the identity.
  static PhaseSpaceWindow full() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {0.0, inf, 0.0, inf, 0.25};
  }
};

/// Raised-cosine cutoff at distance d for the given halfwidth.
double window_profile(double d, double halfwidth, double taper);

/// Phi = M_chi F^{-1} M_psi F M_chi with F the unitary DFT.
struct CompressionOperator {
  Grid grid;
  double h = 0.0;
  std::vector<double> chi;  // on grid nodes
  std::vector<double> psi;  // on FFT bins
  bool identity = false;    // chi == psi == 1

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
};

/// Throws ResolutionError when the window is not resolvable: x halfwidth at
/// most 4 cells, xi halfwidth at most 4 frequency cells h*2pi/L, or fewer
/// than 8 points per wavelength at the largest windowed frequency.
CompressionOperator build_compression(const PhaseSpaceWindow& window, const Grid& grid, double h);

/// Orthonormal basis of the singular vectors of Phi with sigma >= theta * sigma_max.
/// Computed from the Gram matrix of K = M_chi F^{-1} M_sqrt(psi), Phi = K K*.
Eigen::MatrixXcd range_basis(const CompressionOperator& c, double theta = 0.5);

struct SigmaMinResult {
  double g = 0.0;
  int n = 0;
  int rank = 0;  // columns of the range basis
  bool resolution_warning = false;
};

/// g = sigma_min((op - z) B) for B the range basis of c.
SigmaMinResult restricted_sigma_min(const DiscreteOperator& op, const CompressionOperator& c,
                                    double z, double theta = 0.5);

/// Element-aware form: requires |z - elem.level| <= z_window * (max V0 - min V0).
SigmaMinResult restricted_sigma_min(const EffectivePotential& pot, const CriticalElement& elem,
                                    double z, double h, const Grid& grid,
                                    const PhaseSpaceWindow& window, double theta = 0.5,
                                    Scheme scheme = Scheme::Spectral, double z_window = 0.05);

/// Window centred on the element: x halfwidth = half its length + 1.5, xi halfwidth 0.5.
PhaseSpaceWindow default_window(const CriticalElement& elem);

enum class RateModel { PurePower, LogCorrected };
std::string to_string(RateModel m);

/// log g = exponent * log h - log_gamma * log log(1/h) + intercept.
struct RateFit {
  RateModel model = RateModel::PurePower;
  double exponent = 0.0;
  double log_gamma = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::vector<double> h_list;
  std::vector<double> g_list;
  bool reliable = true;  // false if g fails to decrease with h beyond noise
};

/// Least-squares fit. Requires >= 5 positive samples with max h / min h >= min_span.
RateFit fit_rate(std::span<const double> h, std::span<const double> g, RateModel model,
                 double min_span = 8.0);

/// n = clamp(bit_ceil(points * L / (2 pi h)), n_min, n_max).
struct GridPolicy {
  int n_min = 1024;
  int n_max = 4096;
  double points = 8.0;
  int grid_for(double h, double period) const;
};

/// {1/50 * 2^{-j/2} : j = 0..8}.
std::vector<double> default_h_sweep();

struct GapSweep {
  std::vector<double> h;
  std::vector<double> g;
  std::vector<int> n;
  std::vector<int> rank;
  bool resolution_warning = false;
};

GapSweep gap_sweep(const EffectivePotential& pot, const CriticalElement& elem, double z,
                   std::span<const double> hs, const GridPolicy& policy,
                   const PhaseSpaceWindow& window, double theta = 0.5,
                   Scheme scheme = Scheme::Spectral);

RateFit gap_rate_fit(const EffectivePotential& pot, const CriticalElement& elem, double z,
                     std::span<const double> hs, const GridPolicy& policy, RateModel model);

enum class RateStatus { Pass, Fail, Unreliable, NotApplicable };
std::string to_string(RateStatus s);

struct RateVerdict {
  RateStatus status = RateStatus::NotApplicable;
  std::string detail;
};

/// Finite exponents: |alpha - predicted| <= 0.1. Log-corrected: pure alpha in
/// (1, 1.25) and the log model has smaller residual. eta-slack: alpha in
/// [1.6, 2.2]. Any alpha above 2.2 fails.
RateVerdict judge_rate(const RateFit& pure, const RateFit& log_corrected,
                       const std::optional<PredictedExponent>& predicted);

PsiClass psi_partition_class(const SurfaceMode& mode, double A0, double A1);

/// One angular sector c * phi(x) e^{ik theta} of a multi-mode combination.
struct SectorComponent {
  int k = 0;
  cplx c{1.0, 0.0};
  Eigen::VectorXd phi;  // discrete L2-normalized in x
};

/// Number of k with ||sector_k||^2 >= threshold * ||u||^2; sectors with the
/// same k are summed first.
int fourier_spread(std::span<const SectorComponent> u, double threshold);

/// L2(dx dtheta) inner product of two sectors, evaluated by quadrature on a
/// theta grid fine enough to resolve both.
cplx sector_overlap(const SectorComponent& a, const SectorComponent& b, double spacing);

}  // namespace revlab
