#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "revlab/fourier.hpp"
#include "revlab/geometry.hpp"

namespace revlab {

enum class Scheme { Fd2, Fd4, Spectral };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

/// Uniform periodic grid x_j = j * period / n.
struct Grid {
  int n = 0;
  double period = 0.0;

  /// Throws InputError unless n >= 64 is a power of two and period > 0.
  static Grid make(int n, double period);
  double spacing() const { return period / n; }
  double node(int j) const { return j * period / n; }
};

/// Discretization of kinetic * D^2 + diag(potential) on a periodic grid,
/// where D = -i d/dx. The semiclassical form has kinetic = h^2.
class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, Scheme scheme, double h, double kinetic,
                   std::vector<double> potential, bool resolution_warning);

  const Grid& grid() const { return grid_; }
  Scheme scheme() const { return scheme_; }
  double h() const { return h_; }
  double kinetic() const { return kinetic_; }
  const std::vector<double>& potential() const { return potential_; }
  bool resolution_warning() const { return resolution_warning_; }

  /// Symbol of the kinetic part on FFT bin j (exact for every scheme).
  double symbol(int j) const;

  Eigen::MatrixXd dense() const;
  /// out = (matrix) * in, matrix-free. Not thread-safe across calls on one object.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  Grid grid_;
  Scheme scheme_;
  double h_;
  double kinetic_;
  std::vector<double> potential_;
  bool resolution_warning_;
  std::vector<double> symbol_;
  mutable std::vector<cplx> scratch_;
  mutable std::shared_ptr<Fft> fft_;
};

/// (hD)^2 + V0 + h^2 V1. The warning flag is set when the grid has fewer than
/// 8 points per local wavelength 2 pi h / sqrt(max V0).
DiscreteOperator discretize(const EffectivePotential& pot, double h, const Grid& grid,
                            Scheme scheme = Scheme::Spectral);

/// Unscaled separated operator -d^2/dx^2 + k^2 v0 + v1 for angular momentum k.
DiscreteOperator separated_operator(const EffectivePotential& pot, int k, const Grid& grid,
                                    Scheme scheme = Scheme::Spectral);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // unit Euclidean norm
  double residual = 0.0;   // ||(M - value) v||_2
};

/// All eigenpairs with value in [lo, hi], ascending. Each vector's first
/// component above 1e-8 of its max-norm is made positive.
std::vector<EigenPair> eigen_window(const DiscreteOperator& op, double lo, double hi);

/// Eigenvalues only, ascending.
std::vector<double> eigenvalues(const DiscreteOperator& op);

enum class PsiClass { Psi0, Psi1, Psi2 };
std::string to_string(PsiClass c);

/// psi0 if eta^2 <= A0^2/2, psi2 if eta^2 >= 2 A1^2, psi1 otherwise.
PsiClass psi_class_for(double eta, double A0, double A1);

/// Joint eigenmode phi_k(x) e^{ik theta} of the surface Laplacian.
struct SurfaceMode {
  int k = 0;
  double lambda_sq = 0.0;
  Eigen::VectorXd phi;  // sum |phi_j|^2 * spacing = 1
  double period = 0.0;
  double residual = 0.0;  // relative to the unit-norm vector
  double eta = 0.0;       // k / lambda; 0 when lambda = 0
  PsiClass psi_class = PsiClass::Psi0;

  double lambda() const { return std::sqrt(std::max(lambda_sq, 0.0)); }
  int n() const { return static_cast<int>(phi.size()); }
};

struct SurfaceSpectrumOptions {
  Scheme scheme = Scheme::Spectral;
  bool include_negative_k = true;  // emit -k copies (identical spectra)
  bool vectors = true;             // false: phi left empty, residual 0
};

struct SurfaceSpectrum {
  std::vector<SurfaceMode> modes;  // sorted by lambda_sq, then k
  int rejected = 0;                // eigenpairs failing the residual bound
  bool resolution_warning = false;
};

/// Union over |k| <= k_max of the spectra of the separated operators, cut at
/// lambda_max^2. Accepted modes satisfy residual <= 1e-8 * max(lambda^2, 1).
SurfaceSpectrum surface_spectrum(const EffectivePotential& pot, int k_max, double lambda_max,
                                 const Grid& grid, const SurfaceSpectrumOptions& opts = {});

/// Eigenpairs of one separated operator as surface modes, ascending.
std::vector<SurfaceMode> modes_for_k(const EffectivePotential& pot, int k, double lambda_sq_lo,
                                     double lambda_sq_hi, const Grid& grid,
                                     Scheme scheme = Scheme::Spectral, int* rejected = nullptr);

/// Binary dump: "RVLM", u32 version = 1, u64 n, f64 period, i64 k,
/// f64 lambda_sq, then n f64 samples of phi. Little-endian throughout.
void write_mode_dump(const SurfaceMode& mode, std::ostream& out);
SurfaceMode read_mode_dump(std::istream& in);

}  // namespace revlab
