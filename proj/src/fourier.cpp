#include "revlab/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "revlab/errors.hpp"

namespace revlab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  fftw_complex* buf_in = nullptr;
  fftw_complex* buf_out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit Impl(int n) {
    std::lock_guard lock(planner_mutex());
    buf_in = fftw_alloc_complex(n);
    buf_out = fftw_alloc_complex(n);
    fwd = fftw_plan_dft_1d(n, buf_in, buf_out, FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_dft_1d(n, buf_in, buf_out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(buf_in);
    fftw_free(buf_out);
  }
};

Fft::Fft(int n) : n_(n) {
  if (n < 1) throw InputError("Fft: length must be positive");
  impl_ = std::make_unique<Impl>(n);
}
Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const cplx> in, std::span<cplx> out) {
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(impl_->buf_in));
  fftw_execute(impl_->fwd);
  const auto* res = reinterpret_cast<const cplx*>(impl_->buf_out);
  std::copy(res, res + n_, out.begin());
}

void Fft::inverse(std::span<const cplx> in, std::span<cplx> out) {
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(impl_->buf_in));
  fftw_execute(impl_->inv);
  const auto* res = reinterpret_cast<const cplx*>(impl_->buf_out);
  const double scale = 1.0 / n_;
  for (int j = 0; j < n_; ++j) out[j] = res[j] * scale;
}

SpectralDerivatives spectral_derivatives(std::span<const double> samples, double period) {
  const int n = static_cast<int>(samples.size());
  Fft fft(n);
  std::vector<cplx> in(samples.begin(), samples.end()), hat(n), tmp(n), back(n);
  fft.forward(in, hat);
  const double w = 2.0 * std::numbers::pi / period;
  SpectralDerivatives out;
  out.f.assign(samples.begin(), samples.end());
  out.df.resize(n);
  out.d2f.resize(n);
  for (int j = 0; j < n; ++j) {
    const int k = wavenumber(j, n);
    const bool nyquist = (n % 2 == 0) && (j == n / 2);
    tmp[j] = nyquist ? cplx{} : hat[j] * cplx(0.0, k * w);
  }
  fft.inverse(tmp, back);
  for (int j = 0; j < n; ++j) out.df[j] = back[j].real();
  for (int j = 0; j < n; ++j) {
    const int k = wavenumber(j, n);
    tmp[j] = hat[j] * (-(k * w) * (k * w));
  }
  fft.inverse(tmp, back);
  for (int j = 0; j < n; ++j) out.d2f[j] = back[j].real();
  return out;
}

TrigInterpolant::TrigInterpolant(std::span<const double> samples, double period)
    : period_(period), n_(static_cast<int>(samples.size())) {
  if (n_ < 4) throw InputError("TrigInterpolant: need at least 4 samples");
  Fft fft(n_);
  std::vector<cplx> in(samples.begin(), samples.end());
  coeff_.resize(n_);
  fft.forward(in, coeff_);
  for (auto& c : coeff_) c /= static_cast<double>(n_);
}

std::array<double, 3> TrigInterpolant::eval(double x) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double f = coeff_[0].real(), df = 0.0, d2f = 0.0;
  const cplx step = std::polar(1.0, w * x);
  cplx phase = step;
  const int half = n_ / 2;
  for (int k = 1; k < (n_ + 1) / 2; ++k) {
    // Paired +-k terms of a real signal: 2 Re(c_k e^{ikwx}).
    const cplx term = coeff_[k] * phase;
    const double kw = k * w;
    f += 2.0 * term.real();
    df += -2.0 * kw * term.imag();
    d2f += -2.0 * kw * kw * term.real();
    if (k % 64 == 0) {
      phase = std::polar(1.0, w * x * (k + 1));
    } else {
      phase *= step;
    }
  }
  if (n_ % 2 == 0) {
    const double kw = half * w;
    const double c = coeff_[half].real();
    f += c * std::cos(kw * x);
    df += -kw * c * std::sin(kw * x);
    d2f += -kw * kw * c * std::cos(kw * x);
  }
  return {f, df, d2f};
}

}  // namespace revlab
