#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace revlab {

using cplx = std::complex<double>;

// Unitary-free 1D DFT of fixed length backed by FFTW. forward() computes
// X_j = sum_m x_m e^{-2 pi i j m / n}; inverse() includes the 1/n factor so
// inverse(forward(x)) == x. Plans are created under a global lock; execution
// on distinct Fft objects is thread-safe.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  int size() const { return n_; }
  void forward(std::span<const cplx> in, std::span<cplx> out);
  void inverse(std::span<const cplx> in, std::span<cplx> out);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// Signed integer wavenumber of FFT bin j for length n: 0, 1, ..., n/2, -n/2+1, ..., -1.
// The Nyquist bin of an even-length transform is reported as +n/2.
inline int wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

// Spectral derivatives of order 0, 1, 2 of periodic samples on a uniform grid
// of the given period. The Nyquist mode is dropped for odd orders.
struct SpectralDerivatives {
  std::vector<double> f, df, d2f;
};
SpectralDerivatives spectral_derivatives(std::span<const double> samples, double period);

// Trigonometric interpolant of periodic samples; evaluates value and first two
// derivatives anywhere on the circle in O(n).
class TrigInterpolant {
 public:
  TrigInterpolant(std::span<const double> samples, double period);
  double period() const { return period_; }
  // Returns {f, f', f''} at x.
  std::array<double, 3> eval(double x) const;

 private:
  double period_;
  std::vector<cplx> coeff_;  // indexed by wavenumber offset; coeff_[j] for j in [0, n)
  int n_;
};

}  // namespace revlab
