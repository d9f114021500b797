#include "revlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "revlab/errors.hpp"
#include "revlab/parallel.hpp"

namespace revlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

BandRegion BandRegion::make(double a, double b, std::string label, double period) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw InputError("band endpoints must be finite");
  const double d = std::fmod(std::abs(b - a), period);
  if (d < 1e-12 * period || period - d < 1e-12 * period)
    throw InputError("band endpoints coincide modulo the period");
  return BandRegion{a, b, std::move(label)};
}

double BandRegion::hi(double period) const {
  double h = b;
  while (h <= a) h += period;
  while (h > a + period) h -= period;
  return h;
}

std::string to_string(Measure m) { return m == Measure::Flat ? "flat" : "volume"; }

double band_mass(const SurfaceMode& mode, const BandRegion& band, Measure measure,
                 const EffectivePotential& pot) {
  const int n = mode.n();
  if (n == 0) throw InputError("band_mass: mode carries no samples");
  const double L = mode.period;
  const double dx = L / n;
  const double lo = band.a, hi = band.hi(L);
  if (hi - lo < 4.0 * dx) throw InputError("band_mass: band shorter than 4 grid cells");

  std::vector<double> f(n);
  for (int j = 0; j < n; ++j) {
    const double p = mode.phi[j] * mode.phi[j];
    f[j] = measure == Measure::Volume ? p : p / pot.curve().A(j * dx);
  }
  // prefix[c] = integral over cells [0, c) in cell units.
  std::vector<double> prefix(n + 1, 0.0);
  for (int c = 0; c < n; ++c) prefix[c + 1] = prefix[c] + 0.5 * (f[c] + f[(c + 1) % n]);
  const double total = prefix[n];
  if (!(total > 0.0)) throw InputError("band_mass: mode has zero mass");
  auto prim = [&](double x) {
    const double t = x / dx;
    const double q = std::floor(t);
    const double s = t - q;
    const long long qi = static_cast<long long>(q);
    const long long wraps = qi >= 0 ? qi / n : -((-qi + n - 1) / n);
    const int c = static_cast<int>(qi - wraps * n);
    const double fc = f[c], fn = f[(c + 1) % n];
    return wraps * total + prefix[c] + fc * s + 0.5 * (fn - fc) * s * s;
  };
  return (prim(hi) - prim(lo)) / total;
}

namespace {

ModeFamily sorted(ModeFamily fam) {
  std::stable_sort(fam.members.begin(), fam.members.end(),
                   [](const SurfaceMode& a, const SurfaceMode& b) { return a.lambda_sq < b.lambda_sq; });
  return fam;
}

}  // namespace

ModeFamily well_family(const EffectivePotential& pot, const std::vector<int>& ks,
                       const Grid& grid, double lambda_max) {
  auto per_k = parallel_map(ks.size(), [&](std::size_t i) {
    auto modes = modes_for_k(pot, ks[i], -kInf, lambda_max * lambda_max, grid);
    std::optional<SurfaceMode> out;
    if (!modes.empty() && modes.front().lambda_sq > 0.0) out = std::move(modes.front());
    return out;
  });
  ModeFamily fam{"ground mode of P_k", {}};
  for (auto& m : per_k)
    if (m) fam.members.push_back(std::move(*m));
  return sorted(std::move(fam));
}

ModeFamily barrier_family(const EffectivePotential& pot, double level, const std::vector<int>& ks,
                          const Grid& grid, double lambda_max) {
  auto per_k = parallel_map(ks.size(), [&](std::size_t i) {
    const double target = static_cast<double>(ks[i]) * ks[i] * level;
    auto modes = modes_for_k(pot, ks[i], -kInf, lambda_max * lambda_max, grid);
    std::optional<SurfaceMode> best;
    for (auto& m : modes) {
      if (m.lambda_sq <= 0.0) continue;
      if (!best || std::abs(m.lambda_sq - target) < std::abs(best->lambda_sq - target)) best = m;
    }
    return best;
  });
  char buf[96];
  std::snprintf(buf, sizeof buf, "lambda^2 nearest k^2 * %.6g", level);
  ModeFamily fam{buf, {}};
  for (auto& m : per_k)
    if (m) fam.members.push_back(std::move(*m));
  return sorted(std::move(fam));
}

ModeFamily fixed_k_family(const EffectivePotential& pot, int k, double lambda_lo,
                          double lambda_hi, const Grid& grid) {
  if (!(lambda_lo <= lambda_hi)) throw InputError("fixed_k_family: empty lambda range");
  ModeFamily fam{"k = " + std::to_string(k) + ", lambda in [" + std::to_string(lambda_lo) + ", " +
                     std::to_string(lambda_hi) + "]",
                 {}};
  for (auto& m : modes_for_k(pot, k, lambda_lo * lambda_lo, lambda_hi * lambda_hi, grid))
    if (m.lambda_sq > 0.0) fam.members.push_back(std::move(m));
  return fam;
}

std::vector<int> geometric_ks(int lo, int hi) {
  if (lo < 1 || hi < lo) throw InputError("geometric_ks: need 1 <= lo <= hi");
  std::set<int> ks;
  for (double k = lo; k <= hi + 0.5; k *= std::sqrt(2.0)) ks.insert(static_cast<int>(std::lround(k)));
  return {ks.begin(), ks.end()};
}

std::vector<ModeFamily> standard_families(const EffectivePotential& pot,
                                          const std::vector<CriticalElement>& elements,
                                          const Grid& grid, double lambda_min, double lambda_max) {
  std::vector<ModeFamily> out;
  auto k_range = [&](double level) {
    const int lo = std::max(1, static_cast<int>(std::ceil(lambda_min / std::sqrt(level))));
    const int hi = static_cast<int>(std::floor(lambda_max / std::sqrt(level)));
    return hi >= lo ? geometric_ks(lo, hi) : std::vector<int>{};
  };
  const bool has_min = std::any_of(elements.begin(), elements.end(), [](const CriticalElement& e) {
    return e.taxonomy == Taxonomy::WeaklyStableMin;
  });
  if (has_min) {
    if (auto ks = k_range(pot.v0_range().first); !ks.empty())
      out.push_back(well_family(pot, ks, grid, lambda_max));
  }
  std::vector<double> levels;
  for (const auto& e : elements) {
    if (!weakly_unstable(e)) continue;
    const bool seen = std::any_of(levels.begin(), levels.end(), [&](double l) {
      return std::abs(l - e.level) <= 1e-9 * std::max(1.0, std::abs(l));
    });
    if (!seen) levels.push_back(e.level);
  }
  for (double level : levels)
    if (auto ks = k_range(level); !ks.empty()) out.push_back(barrier_family(pot, level, ks, grid, lambda_max));
  out.push_back(fixed_k_family(pot, 0, lambda_min, lambda_max, grid));
  out.push_back(fixed_k_family(pot, 1, lambda_min, lambda_max, grid));
  return out;
}

WavefrontProxy wavefront_proxy(const SurfaceMode& mode, const BandRegion& band,
                               const EffectivePotential& pot, double threshold) {
  const int n = mode.n();
  const double L = mode.period;
  const double lo = band.a, hi = band.hi(L);
  const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const double k2 = static_cast<double>(mode.k) * mode.k;

  double emax = -kInf;
  std::vector<cplx> w(n), total(n), spec(n);
  for (int j = 0; j < n; ++j) {
    const double x = j * L / n;
    double d = std::fmod(x - center, L);
    if (d < 0) d += L;
    d = std::min(d, L - d);
    const double chi = window_profile(d, half, 0.25);
    w[j] = chi * mode.phi[j];
    total[j] = mode.phi[j];
    if (d <= half) emax = std::max(emax, mode.lambda_sq - k2 * pot.v0(x));
  }
  WavefrontProxy out;
  if (emax < 0.0) return out;
  const double cut = std::sqrt(emax) + 2.0 * kTwoPi / (hi - lo);
  Fft fft(n);
  fft.forward(w, spec);
  double inside = 0.0;
  for (int j = 0; j < n; ++j)
    if (std::abs(kTwoPi * wavenumber(j, n) / L) <= cut) inside += std::norm(spec[j]);
  fft.forward(total, spec);
  double all = 0.0;
  for (int j = 0; j < n; ++j) all += std::norm(spec[j]);
  out.value = all > 0.0 ? inside / all : 0.0;
  out.meets = out.value > threshold;
  return out;
}

namespace {

RateFit fit_masses(const std::vector<double>& lambdas, const std::vector<double>& masses) {
  std::vector<double> inv(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) inv[i] = 1.0 / lambdas[i];
  RateFit f = fit_rate(inv, masses, RateModel::PurePower, 4.0);
  f.reliable = true;  // masses carry no monotonicity expectation
  return f;
}

}  // namespace

MassFit mass_rate_fit(const ModeFamily& family, const BandRegion& band,
                      const EffectivePotential& pot, Measure measure, double wavefront_threshold) {
  if (family.members.size() < 5) throw InputError("mass_rate_fit: family has fewer than 5 members");
  std::vector<double> lambdas, masses;
  MassFit out;
  for (const auto& m : family.members) {
    lambdas.push_back(m.lambda());
    masses.push_back(band_mass(m, band, measure, pot));
    if (!wavefront_proxy(m, band, pot, wavefront_threshold).meets) out.vacuous = true;
  }
  const auto [lmin, lmax] = std::minmax_element(lambdas.begin(), lambdas.end());
  if (*lmax / *lmin < 4.0) throw InputError("mass_rate_fit: family spans a lambda factor below 4");
  out.fit = fit_masses(lambdas, masses);
  return out;
}

UniformMassResult uniform_mass_check(const ModeFamily& family, const BandRegion& band,
                                     const EffectivePotential& pot, double ratio_bound) {
  if (family.members.empty()) throw InputError("uniform_mass_check: empty family");
  UniformMassResult r;
  r.min_mass = kInf;
  for (const auto& m : family.members) {
    if (psi_partition_class(m, pot.A0(), pot.A1()) != PsiClass::Psi0)
      throw InputError("uniform_mass_check: family contains a non-psi0 mode");
    const double mass = band_mass(m, band, Measure::Flat, pot);
    r.min_mass = std::min(r.min_mass, mass);
    r.max_mass = std::max(r.max_mass, mass);
  }
  r.ratio = r.min_mass > 0.0 ? r.max_mass / r.min_mass : kInf;
  r.pass = r.ratio <= ratio_bound;
  return r;
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::Vanishing: return "vanishing";
    case Branch::LowerBounded: return "lower-bounded";
    case Branch::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

DichotomyReport dichotomy_report(const ModeFamily& family, const BandRegion& band,
                                 const EffectivePotential& pot, const DichotomyOptions& opts) {
  DichotomyReport rep;
  rep.band = band;
  rep.family = family.selector;
  std::vector<double> vol;
  int below = 0;
  rep.wavefront_meets_band = !family.members.empty();
  rep.wavefront_min = kInf;
  rep.wavefront_max = 0.0;
  for (const auto& m : family.members) {
    const double lam = m.lambda();
    const double mass = band_mass(m, band, Measure::Flat, pot);
    rep.ks.push_back(m.k);
    rep.lambdas.push_back(lam);
    rep.masses.push_back(mass);
    vol.push_back(band_mass(m, band, Measure::Volume, pot));
    if (mass <= std::pow(lam, -opts.vanishing_degree)) ++below;
    const WavefrontProxy wf = wavefront_proxy(m, band, pot, opts.wavefront_threshold);
    rep.wavefront_min = std::min(rep.wavefront_min, wf.value);
    rep.wavefront_max = std::max(rep.wavefront_max, wf.value);
    rep.wavefront_meets_band = rep.wavefront_meets_band && wf.meets;
  }
  const int total = static_cast<int>(family.members.size());
  if (total == 0) {
    rep.wavefront_min = 0.0;
    rep.note = "empty family";
    return rep;
  }
  if (below == total) {
    rep.branch = Branch::Vanishing;
    rep.verdict = Verdict::Pass;
    return rep;
  }
  if (below > 0) {
    rep.branch = Branch::Inconclusive;
    rep.note = std::to_string(below) + " of " + std::to_string(total) +
               " masses below lambda^-" + std::to_string(opts.vanishing_degree);
    return rep;
  }
  rep.branch = Branch::LowerBounded;
  try {
    rep.gamma_fit = fit_masses(rep.lambdas, rep.masses);
    rep.gamma_volume = fit_masses(rep.lambdas, vol).exponent;
  } catch (const InputError& e) {
    rep.branch = Branch::Inconclusive;
    rep.note = std::string("gamma fit impossible: ") + e.what();
    return rep;
  }
  const double gamma = rep.gamma_fit->exponent;
  rep.delta_hat = 1.0 - gamma;
  for (std::size_t m = 5; m < rep.lambdas.size(); m *= 2) {
    std::vector<double> l(rep.lambdas.begin(), rep.lambdas.begin() + static_cast<long>(m));
    std::vector<double> s(rep.masses.begin(), rep.masses.begin() + static_cast<long>(m));
    if (l.back() / l.front() < 4.0) continue;
    rep.gamma_trend.push_back(fit_masses(l, s).exponent);
  }
  rep.verdict = gamma <= 1.0 + opts.eps_accept ? Verdict::Pass : Verdict::Fail;
  return rep;
}

}  // namespace revlab
