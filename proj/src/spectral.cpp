#include "revlab/spectral.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include "revlab/errors.hpp"
#include "revlab/parallel.hpp"

namespace revlab {

static_assert(std::endian::native == std::endian::little,
              "mode dump I/O assumes a little-endian host");

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Fd2: return "fd2";
    case Scheme::Fd4: return "fd4";
    case Scheme::Spectral: return "spectral";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "fd2") return Scheme::Fd2;
  if (s == "fd4") return Scheme::Fd4;
  if (s == "spectral") return Scheme::Spectral;
  throw InputError("unknown scheme '" + s + "' (expected fd2, fd4 or spectral)");
}

Grid Grid::make(int n, double period) {
  if (n < 64 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw InputError("grid size must be a power of two >= 64, got " + std::to_string(n));
  if (!(period > 0.0) || !std::isfinite(period)) throw InputError("grid period must be positive");
  return Grid{n, period};
}

DiscreteOperator::DiscreteOperator(Grid grid, Scheme scheme, double h, double kinetic,
                                   std::vector<double> potential, bool resolution_warning)
    : grid_(grid),
      scheme_(scheme),
      h_(h),
      kinetic_(kinetic),
      potential_(std::move(potential)),
      resolution_warning_(resolution_warning) {
  if (static_cast<int>(potential_.size()) != grid_.n)
    throw InputError("DiscreteOperator: potential size does not match grid");
  const int n = grid_.n;
  const double dx = grid_.spacing();
  symbol_.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n;
    switch (scheme_) {
      case Scheme::Spectral: {
        const double xi = 2.0 * std::numbers::pi * wavenumber(j, n) / grid_.period;
        symbol_[j] = kinetic_ * xi * xi;
        break;
      }
      case Scheme::Fd2: symbol_[j] = kinetic_ * 2.0 * (1.0 - std::cos(t)) / (dx * dx); break;
      case Scheme::Fd4:
        symbol_[j] = kinetic_ * (30.0 - 32.0 * std::cos(t) + 2.0 * std::cos(2.0 * t)) / (12.0 * dx * dx);
        break;
    }
  }
}

double DiscreteOperator::symbol(int j) const { return symbol_.at(j); }

Eigen::MatrixXd DiscreteOperator::dense() const {
  const int n = grid_.n;
  const double dx2 = grid_.spacing() * grid_.spacing();
  std::vector<double> c(n, 0.0);  // first column of the kinetic circulant
  switch (scheme_) {
    case Scheme::Fd2:
      c[0] = 2.0 * kinetic_ / dx2;
      c[1] = c[n - 1] = -kinetic_ / dx2;
      break;
    case Scheme::Fd4:
      c[0] = 30.0 * kinetic_ / (12.0 * dx2);
      c[1] = c[n - 1] = -16.0 * kinetic_ / (12.0 * dx2);
      c[2] = c[n - 2] = kinetic_ / (12.0 * dx2);
      break;
    case Scheme::Spectral: {
      std::vector<cplx> s(symbol_.begin(), symbol_.end()), out(n);
      Fft fft(n);
      fft.inverse(s, out);
      c[0] = out[0].real();
      for (int m = 1; m <= n / 2; ++m) c[m] = c[n - m] = 0.5 * (out[m].real() + out[n - m].real());
      break;
    }
  }
  Eigen::MatrixXd M(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) M(a, b) = c[(a - b + n) % n];
  for (int a = 0; a < n; ++a) M(a, a) += potential_[a];
  return M;
}

void DiscreteOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const int n = grid_.n;
  if (static_cast<int>(in.size()) != n || static_cast<int>(out.size()) != n)
    throw InputError("DiscreteOperator::apply: size mismatch");
  const double dx2 = grid_.spacing() * grid_.spacing();
  auto at = [&](int j) { return in[(j % n + n) % n]; };
  switch (scheme_) {
    case Scheme::Fd2:
      for (int j = 0; j < n; ++j)
        out[j] = kinetic_ * (2.0 * in[j] - at(j - 1) - at(j + 1)) / dx2 + potential_[j] * in[j];
      return;
    case Scheme::Fd4:
      for (int j = 0; j < n; ++j)
        out[j] = kinetic_ *
                     (30.0 * in[j] - 16.0 * (at(j - 1) + at(j + 1)) + at(j - 2) + at(j + 2)) /
                     (12.0 * dx2) +
                 potential_[j] * in[j];
      return;
    case Scheme::Spectral: {
      if (!fft_) fft_ = std::make_shared<Fft>(n);
      scratch_.resize(n);
      fft_->forward(in, scratch_);
      for (int j = 0; j < n; ++j) scratch_[j] *= symbol_[j];
      fft_->inverse(scratch_, out);
      for (int j = 0; j < n; ++j) out[j] += potential_[j] * in[j];
      return;
    }
  }
}

namespace {

bool under_resolved(const EffectivePotential& pot, double h, const Grid& grid) {
  const double vmax = pot.v0_range().second;
  const double wavelength = 2.0 * std::numbers::pi * h / std::sqrt(vmax);
  return wavelength / grid.spacing() < 8.0;
}

}  // namespace

DiscreteOperator discretize(const EffectivePotential& pot, double h, const Grid& grid,
                            Scheme scheme) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("discretize: h must be positive");
  if (std::abs(grid.period - pot.period()) > 1e-12 * pot.period())
    throw InputError("discretize: grid period differs from the curve period");
  std::vector<double> v(grid.n);
  for (int j = 0; j < grid.n; ++j) v[j] = pot.v_at(h, grid.node(j));
  return DiscreteOperator(grid, scheme, h, h * h, std::move(v), under_resolved(pot, h, grid));
}

DiscreteOperator separated_operator(const EffectivePotential& pot, int k, const Grid& grid,
                                    Scheme scheme) {
  if (std::abs(grid.period - pot.period()) > 1e-12 * pot.period())
    throw InputError("separated_operator: grid period differs from the curve period");
  std::vector<double> v(grid.n);
  const double k2 = static_cast<double>(k) * k;
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.node(j);
    v[j] = k2 * pot.v0(x) + pot.v1(x);
  }
  const double h = k == 0 ? 0.0 : 1.0 / std::abs(k);
  const bool warn = k != 0 && under_resolved(pot, h, grid);
  return DiscreteOperator(grid, scheme, h, 1.0, std::move(v), warn);
}

std::vector<EigenPair> eigen_window(const DiscreteOperator& op, double lo, double hi) {
  std::vector<EigenPair> out;
  if (!(lo <= hi)) return out;
  const Eigen::MatrixXd M = op.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen_window: eigensolver failed");
  const auto& vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < lo || vals[i] > hi) continue;
    EigenPair p;
    p.value = vals[i];
    p.vector = es.eigenvectors().col(i);
    const double vmax = p.vector.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < p.vector.size(); ++j) {
      if (std::abs(p.vector[j]) > 1e-8 * vmax) {
        if (p.vector[j] < 0) p.vector = -p.vector;
        break;
      }
    }
    p.residual = (M * p.vector - p.value * p.vector).norm();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> eigenvalues(const DiscreteOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalues: eigensolver failed");
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

std::string to_string(PsiClass c) {
  switch (c) {
    case PsiClass::Psi0: return "psi0";
    case PsiClass::Psi1: return "psi1";
    case PsiClass::Psi2: return "psi2";
  }
  return "?";
}

PsiClass psi_class_for(double eta, double A0, double A1) {
  const double e2 = eta * eta;
  if (e2 <= 0.5 * A0 * A0) return PsiClass::Psi0;
  if (e2 >= 2.0 * A1 * A1) return PsiClass::Psi2;
  return PsiClass::Psi1;
}

namespace {

double eta_of(int k, double lambda_sq) {
  return lambda_sq > 0.0 ? k / std::sqrt(lambda_sq) : 0.0;
}

bool residual_ok(double residual, double lambda_sq) {
  return residual <= 1e-8 * std::max(std::abs(lambda_sq), 1.0);
}

}  // namespace

std::vector<SurfaceMode> modes_for_k(const EffectivePotential& pot, int k, double lambda_sq_lo,
                                     double lambda_sq_hi, const Grid& grid, Scheme scheme,
                                     int* rejected) {
  const DiscreteOperator op = separated_operator(pot, k, grid, scheme);
  const double norm = 1.0 / std::sqrt(grid.spacing());
  std::vector<SurfaceMode> out;
  int bad = 0;
  for (auto& p : eigen_window(op, lambda_sq_lo, lambda_sq_hi)) {
    if (!residual_ok(p.residual, p.value)) {
      ++bad;
      continue;
    }
    SurfaceMode m;
    m.k = k;
    m.lambda_sq = p.value;
    m.phi = p.vector * norm;
    m.period = grid.period;
    m.residual = p.residual;
    m.eta = eta_of(k, p.value);
    m.psi_class = psi_class_for(m.eta, pot.A0(), pot.A1());
    out.push_back(std::move(m));
  }
  if (rejected) *rejected = bad;
  return out;
}

SurfaceSpectrum surface_spectrum(const EffectivePotential& pot, int k_max, double lambda_max,
                                 const Grid& grid, const SurfaceSpectrumOptions& opts) {
  if (k_max < 0) throw InputError("surface_spectrum: k_max must be >= 0");
  if (!(lambda_max >= 0.0)) throw InputError("surface_spectrum: lambda_max must be >= 0");
  const double cut = lambda_max * lambda_max;
  const double v0min = pot.v0_range().first;
  double v1min = 0.0;
  for (int j = 0; j < grid.n; ++j) v1min = std::min(v1min, pot.v1(grid.node(j)));
  // P_k >= k^2 min v0 + min v1, so larger k contribute nothing.
  int k_top = k_max;
  while (k_top > 0 && static_cast<double>(k_top) * k_top * v0min + v1min > cut) --k_top;

  struct PerK {
    std::vector<SurfaceMode> modes;
    int rejected = 0;
    bool warning = false;
  };
  auto per_k = parallel_map(static_cast<std::size_t>(k_top) + 1, [&](std::size_t i) {
    const int k = static_cast<int>(i);
    PerK r;
    if (opts.vectors) {
      r.modes = modes_for_k(pot, k, -std::numeric_limits<double>::infinity(), cut, grid,
                            opts.scheme, &r.rejected);
      r.warning = separated_operator(pot, k, grid, opts.scheme).resolution_warning();
    } else {
      const DiscreteOperator op = separated_operator(pot, k, grid, opts.scheme);
      r.warning = op.resolution_warning();
      for (double e : eigenvalues(op)) {
        if (e > cut) break;
        SurfaceMode m;
        m.k = k;
        m.lambda_sq = e;
        m.period = grid.period;
        m.eta = eta_of(k, e);
        m.psi_class = psi_class_for(m.eta, pot.A0(), pot.A1());
        r.modes.push_back(std::move(m));
      }
    }
    return r;
  });

  SurfaceSpectrum out;
  for (auto& r : per_k) {
    out.rejected += r.rejected;
    out.resolution_warning = out.resolution_warning || r.warning;
    for (auto& m : r.modes) {
      if (opts.include_negative_k && m.k != 0) {
        SurfaceMode neg = m;
        neg.k = -m.k;
        neg.eta = -m.eta;
        out.modes.push_back(std::move(neg));
      }
      out.modes.push_back(std::move(m));
    }
  }
  std::stable_sort(out.modes.begin(), out.modes.end(), [](const SurfaceMode& a, const SurfaceMode& b) {
    if (a.lambda_sq != b.lambda_sq) return a.lambda_sq < b.lambda_sq;
    return a.k < b.k;
  });
  return out;
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw InputError("mode dump: truncated input");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

constexpr char kMagic[4] = {'R', 'V', 'L', 'M'};

}  // namespace

void write_mode_dump(const SurfaceMode& mode, std::ostream& out) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(mode.phi.size()));
  put<double>(out, mode.period);
  put<std::int64_t>(out, mode.k);
  put<double>(out, mode.lambda_sq);
  for (Eigen::Index j = 0; j < mode.phi.size(); ++j) put<double>(out, mode.phi[j]);
}

SurfaceMode read_mode_dump(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw InputError("mode dump: bad magic");
  if (get<std::uint32_t>(in) != 1) throw InputError("mode dump: unsupported version");
  const auto n = get<std::uint64_t>(in);
  if (n == 0 || n > (1u << 24)) throw InputError("mode dump: implausible length");
  SurfaceMode m;
  m.period = get<double>(in);
  m.k = static_cast<int>(get<std::int64_t>(in));
  m.lambda_sq = get<double>(in);
  m.phi.resize(static_cast<Eigen::Index>(n));
  for (std::uint64_t j = 0; j < n; ++j) m.phi[static_cast<Eigen::Index>(j)] = get<double>(in);
  m.eta = eta_of(m.k, m.lambda_sq);
  return m;
}

}  // namespace revlab
