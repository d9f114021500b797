#include "revlab/microlocal.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "revlab/errors.hpp"
#include "revlab/parallel.hpp"

namespace revlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circular_distance(double x, double c, double period) {
  double d = std::fmod(x - c, period);
  if (d < 0) d += period;
  return std::min(d, period - d);
}

double bin_frequency(int j, const Grid& grid, double h) {
  return h * kTwoPi * wavenumber(j, grid.n) / grid.period;
}

}  // namespace

double window_profile(double d, double halfwidth, double taper) {
  if (std::isinf(halfwidth)) return 1.0;
  const double inner = (1.0 - taper) * halfwidth;
  if (d <= inner) return 1.0;
  if (d >= halfwidth) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (d - inner) / (halfwidth - inner)));
}

void CompressionOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const int n = grid.n;
  if (static_cast<int>(in.size()) != n || static_cast<int>(out.size()) != n)
    throw InputError("CompressionOperator::apply: size mismatch");
  if (identity) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  std::vector<cplx> a(n), b(n);
  for (int j = 0; j < n; ++j) a[j] = chi[j] * in[j];
  Fft fft(n);
  fft.forward(a, b);
  for (int j = 0; j < n; ++j) b[j] *= psi[j];
  fft.inverse(b, a);
  for (int j = 0; j < n; ++j) out[j] = chi[j] * a[j];
}

CompressionOperator build_compression(const PhaseSpaceWindow& w, const Grid& grid, double h) {
  if (!(h > 0.0)) throw InputError("build_compression: h must be positive");
  if (!(w.taper >= 0.0 && w.taper <= 1.0)) throw InputError("build_compression: taper must lie in [0, 1]");
  if (!(w.x_halfwidth > 0.0) || !(w.xi_halfwidth > 0.0))
    throw InputError("build_compression: halfwidths must be positive");
  if (!(w.x_halfwidth > 4.0 * grid.spacing()))
    throw ResolutionError("window x-halfwidth spans fewer than 4 grid cells");
  const double dxi = h * kTwoPi / grid.period;
  if (!(w.xi_halfwidth > 4.0 * dxi))
    throw ResolutionError("window xi-halfwidth spans fewer than 4 frequency cells at this h");
  if (std::isfinite(w.xi_halfwidth)) {
    const double xi_top = std::abs(w.xi_center) + w.xi_halfwidth;
    const double ppw = kTwoPi * h / xi_top / grid.spacing();
    if (ppw < 8.0)
      throw ResolutionError("grid n = " + std::to_string(grid.n) +
                            " has fewer than 8 points per wavelength at the window's top frequency");
  }

  CompressionOperator c;
  c.grid = grid;
  c.h = h;
  c.chi.resize(grid.n);
  c.psi.resize(grid.n);
  bool ident = true;
  for (int j = 0; j < grid.n; ++j) {
    c.chi[j] = window_profile(circular_distance(grid.node(j), w.x_center, grid.period),
                              w.x_halfwidth, w.taper);
    c.psi[j] = window_profile(std::abs(bin_frequency(j, grid, h) - w.xi_center), w.xi_halfwidth,
                              w.taper);
    ident = ident && c.chi[j] == 1.0 && c.psi[j] == 1.0;
  }
  c.identity = ident;
  return c;
}

Eigen::MatrixXcd range_basis(const CompressionOperator& c, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InputError("range_basis: theta must lie in (0, 1]");
  const int n = c.grid.n;
  if (c.identity) return Eigen::MatrixXcd::Identity(n, n);

  std::vector<int> bins;
  for (int j = 0; j < n; ++j)
    if (c.psi[j] > 0.0) bins.push_back(j);
  if (bins.empty() || *std::max_element(c.chi.begin(), c.chi.end()) == 0.0)
    throw ResolutionError("compression window has empty range");

  // G = K* K with K e_j = chi sqrt(psi_j) e^{2 pi i j x / L} / sqrt(n):
  // G_{jl} = sqrt(psi_j psi_l) * mean_x(chi^2 e^{2 pi i (l - j) x / L}).
  std::vector<cplx> chi2(n), cm(n);
  for (int a = 0; a < n; ++a) chi2[a] = c.chi[a] * c.chi[a];
  Fft fft(n);
  fft.inverse(chi2, cm);
  const int r = static_cast<int>(bins.size());
  Eigen::MatrixXcd G(r, r);
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < r; ++q) {
      const int diff = ((bins[q] - bins[p]) % n + n) % n;
      G(p, q) = std::sqrt(c.psi[bins[p]] * c.psi[bins[q]]) * cm[diff];
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  if (es.info() != Eigen::Success) throw std::runtime_error("range_basis: eigensolver failed");
  const auto& s2 = es.eigenvalues();  // singular values of Phi, ascending
  const double top = s2[r - 1];
  if (!(top > 0.0)) throw ResolutionError("compression window has empty range");

  std::vector<int> keep;
  for (int i = r - 1; i >= 0; --i)
    if (s2[i] >= theta * top) keep.push_back(i);

  Eigen::MatrixXcd B(n, static_cast<Eigen::Index>(keep.size()));
  std::vector<cplx> w(n), col(n);
  const double rootn = std::sqrt(static_cast<double>(n));
  for (std::size_t t = 0; t < keep.size(); ++t) {
    const int i = keep[t];
    std::fill(w.begin(), w.end(), cplx{});
    for (int p = 0; p < r; ++p) w[bins[p]] = std::sqrt(c.psi[bins[p]]) * es.eigenvectors()(p, i);
    fft.inverse(w, col);
    const double scale = rootn / std::sqrt(s2[i]);
    for (int a = 0; a < n; ++a) B(a, static_cast<Eigen::Index>(t)) = c.chi[a] * col[a] * scale;
  }
  return B;
}

SigmaMinResult restricted_sigma_min(const DiscreteOperator& op, const CompressionOperator& c,
                                    double z, double theta) {
  if (op.grid().n != c.grid.n) throw InputError("restricted_sigma_min: grid mismatch");
  SigmaMinResult res;
  res.n = op.grid().n;
  res.resolution_warning = op.resolution_warning();
  if (c.identity) {
    Eigen::MatrixXd M = op.dense();
    M.diagonal().array() -= z;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    res.g = svd.singularValues().minCoeff();
    res.rank = res.n;
    return res;
  }
  const Eigen::MatrixXcd B = range_basis(c, theta);
  const Eigen::Index r = B.cols();
  Eigen::MatrixXcd PB(B.rows(), r);
  std::vector<cplx> in(res.n), out(res.n);
  for (Eigen::Index t = 0; t < r; ++t) {
    for (int a = 0; a < res.n; ++a) in[a] = B(a, t);
    op.apply(in, out);
    for (int a = 0; a < res.n; ++a) PB(a, t) = out[a] - z * in[a];
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(PB);
  res.g = svd.singularValues().minCoeff();
  res.rank = static_cast<int>(r);
  return res;
}

SigmaMinResult restricted_sigma_min(const EffectivePotential& pot, const CriticalElement& elem,
                                    double z, double h, const Grid& grid,
                                    const PhaseSpaceWindow& window, double theta, Scheme scheme,
                                    double z_window) {
  const auto [vmin, vmax] = pot.v0_range();
  const double range = vmax - vmin;
  if (std::abs(z - elem.level) > z_window * range + 1e-15)
    throw InputError("restricted_sigma_min: z is outside the window around the element level");
  const DiscreteOperator op = discretize(pot, h, grid, scheme);
  const CompressionOperator c = build_compression(window, grid, h);
  return restricted_sigma_min(op, c, z, theta);
}

PhaseSpaceWindow default_window(const CriticalElement& elem) {
  PhaseSpaceWindow w;
  w.x_center = elem.interval.center();
  w.x_halfwidth = 0.5 * elem.interval.length() + 1.5;
  w.xi_center = 0.0;
  w.xi_halfwidth = 0.5;
  w.taper = 0.25;
  return w;
}

std::string to_string(RateModel m) {
  return m == RateModel::PurePower ? "pure-power" : "log-corrected";
}

RateFit fit_rate(std::span<const double> h, std::span<const double> g, RateModel model,
                 double min_span) {
  if (h.size() != g.size()) throw InputError("fit_rate: h and g differ in length");
  if (h.size() < 5) throw InputError("fit_rate: need at least 5 samples");
  const auto [hlo, hhi] = std::minmax_element(h.begin(), h.end());
  if (!(*hlo > 0.0)) throw InputError("fit_rate: h values must be positive");
  if (*hhi / *hlo < min_span * (1.0 - 1e-12))
    throw InputError("fit_rate: h values span less than a factor " + std::to_string(min_span));
  if (model == RateModel::LogCorrected && !(*hhi < 1.0))
    throw InputError("fit_rate: the log-corrected model needs h < 1");
  for (double v : g)
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("fit_rate: g values must be positive");

  const Eigen::Index m = static_cast<Eigen::Index>(h.size());
  const int cols = model == RateModel::PurePower ? 2 : 3;
  Eigen::MatrixXd X(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    X(i, 0) = std::log(h[i]);
    X(i, 1) = 1.0;
    if (cols == 3) X(i, 2) = -std::log(std::log(1.0 / h[i]));
    y[i] = std::log(g[i]);
  }
  const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - X * coef;

  RateFit fit;
  fit.model = model;
  fit.exponent = coef[0];
  fit.intercept = coef[1];
  fit.log_gamma = cols == 3 ? coef[2] : 0.0;
  fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  fit.h_list.assign(h.begin(), h.end());
  fit.g_list.assign(g.begin(), g.end());

  // Sort by h descending; g should then not increase beyond roundoff.
  std::vector<std::size_t> idx(h.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return h[a] > h[b]; });
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (g[idx[i]] > g[idx[i - 1]] * (1.0 + 1e-6)) fit.reliable = false;
  return fit;
}

int GridPolicy::grid_for(double h, double period) const {
  if (!(h > 0.0)) throw InputError("GridPolicy: h must be positive");
  const double want = std::ceil(points * period / (kTwoPi * h));
  const unsigned n = std::bit_ceil(static_cast<unsigned>(std::min(want, 1e9)));
  return std::clamp(static_cast<int>(n), n_min, n_max);
}

std::vector<double> default_h_sweep() {
  std::vector<double> hs;
  for (int j = 0; j <= 8; ++j) hs.push_back(std::pow(2.0, -0.5 * j) / 50.0);
  return hs;
}

GapSweep gap_sweep(const EffectivePotential& pot, const CriticalElement& elem, double z,
                   std::span<const double> hs, const GridPolicy& policy,
                   const PhaseSpaceWindow& window, double theta, Scheme scheme) {
  auto results = parallel_map(hs.size(), [&](std::size_t i) {
    const Grid grid = Grid::make(policy.grid_for(hs[i], pot.period()), pot.period());
    return restricted_sigma_min(pot, elem, z, hs[i], grid, window, theta, scheme);
  });
  GapSweep sweep;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    sweep.h.push_back(hs[i]);
    sweep.g.push_back(results[i].g);
    sweep.n.push_back(results[i].n);
    sweep.rank.push_back(results[i].rank);
    sweep.resolution_warning = sweep.resolution_warning || results[i].resolution_warning;
  }
  return sweep;
}

RateFit gap_rate_fit(const EffectivePotential& pot, const CriticalElement& elem, double z,
                     std::span<const double> hs, const GridPolicy& policy, RateModel model) {
  const GapSweep s = gap_sweep(pot, elem, z, hs, policy, default_window(elem));
  return fit_rate(s.h, s.g, model);
}

std::string to_string(RateStatus s) {
  switch (s) {
    case RateStatus::Pass: return "PASS";
    case RateStatus::Fail: return "FAIL";
    case RateStatus::Unreliable: return "UNRELIABLE";
    case RateStatus::NotApplicable: return "N/A";
  }
  return "?";
}

RateVerdict judge_rate(const RateFit& pure, const RateFit& log_corrected,
                       const std::optional<PredictedExponent>& predicted) {
  char buf[256];
  if (!predicted) return {RateStatus::NotApplicable, "weakly stable element: no lower-bound rate"};
  if (pure.exponent > 2.2) {
    std::snprintf(buf, sizeof buf, "exponent %.4f exceeds the ceiling 2.2", pure.exponent);
    return {RateStatus::Fail, buf};
  }
  if (!pure.reliable) return {RateStatus::Unreliable, "g(h) is not monotone in h"};
  if (predicted->log_corrected) {
    const bool in_band = pure.exponent > 1.0 && pure.exponent < 1.25;
    const bool log_better = log_corrected.residual_rms < pure.residual_rms;
    std::snprintf(buf, sizeof buf,
                  "pure exponent %.4f (want (1, 1.25)); rms pure %.3e vs log-corrected %.3e",
                  pure.exponent, pure.residual_rms, log_corrected.residual_rms);
    return {in_band && log_better ? RateStatus::Pass : RateStatus::Fail, buf};
  }
  if (predicted->eta_slack) {
    const bool ok = pure.exponent >= 1.6 && pure.exponent <= 2.2;
    std::snprintf(buf, sizeof buf, "exponent %.4f (want [1.6, 2.2])", pure.exponent);
    return {ok ? RateStatus::Pass : RateStatus::Fail, buf};
  }
  const bool ok = std::abs(pure.exponent - predicted->value()) <= 0.1;
  std::snprintf(buf, sizeof buf, "exponent %.4f vs predicted %s = %.4f (tol 0.1)", pure.exponent,
                predicted->to_string().c_str(), predicted->value());
  return {ok ? RateStatus::Pass : RateStatus::Fail, buf};
}

PsiClass psi_partition_class(const SurfaceMode& mode, double A0, double A1) {
  return psi_class_for(mode.eta, A0, A1);
}

int fourier_spread(std::span<const SectorComponent> u, double threshold) {
  std::map<int, double> mass;
  double total = 0.0;
  for (const auto& s : u) {
    const double m = std::norm(s.c) * s.phi.squaredNorm();
    mass[s.k] += m;
    total += m;
  }
  if (total == 0.0) return 0;
  int count = 0;
  for (const auto& [k, m] : mass)
    if (m >= threshold * total) ++count;
  return count;
}

cplx sector_overlap(const SectorComponent& a, const SectorComponent& b, double spacing) {
  if (a.phi.size() != b.phi.size()) throw InputError("sector_overlap: size mismatch");
  const int m = 4 * (std::abs(a.k) + std::abs(b.k)) + 8;
  cplx angular{};
  for (int t = 0; t < m; ++t) {
    const double th = kTwoPi * t / m;
    angular += std::polar(1.0, (a.k - b.k) * th);
  }
  angular *= kTwoPi / m;
  return a.c * std::conj(b.c) * angular * a.phi.dot(b.phi) * spacing;
}

}  // namespace revlab
