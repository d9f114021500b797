#include "revlab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "revlab/errors.hpp"

namespace revlab {

namespace {

constexpr double kFlatProfileFloor = 1e-14;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double wrap_positive(double x, double period) {
  double r = x - period * std::floor(x / period);
  if (r >= period) r -= period;
  return r;
}

double max_abs_dv0(const EffectivePotential& pot, int samples) {
  double m = 0.0;
  for (int j = 0; j < samples; ++j)
    m = std::max(m, std::abs(pot.v0_jet(pot.period() * j / samples).d1));
  return m;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Root of V0' in [a, b] given opposite signs at the ends.
double bisect_derivative(const EffectivePotential& pot, double a, double b) {
  double fa = pot.v0_jet(a).d1;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = pot.v0_jet(mid).d1;
    if (fm == 0.0) return mid;
    if (sign_of(fm) == sign_of(fa)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Boundary between a point where V0' == 0 exactly and one where it is not.
double bisect_zero_edge(const EffectivePotential& pot, double zero_at, double nonzero_at) {
  for (int it = 0; it < 200 && std::abs(nonzero_at - zero_at) > 1e-13; ++it) {
    const double mid = 0.5 * (zero_at + nonzero_at);
    if (pot.v0_jet(mid).d1 == 0.0)
      zero_at = mid;
    else
      nonzero_at = mid;
  }
  return 0.5 * (zero_at + nonzero_at);
}

double golden_min_abs_derivative(const EffectivePotential& pot, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  auto f = [&](double x) { return std::abs(pot.v0_jet(x).d1); };
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

bool arcs_overlap(Interval a, Interval b, double period) {
  // Shift b to the copy nearest a.
  const double shift = period * std::round((a.center() - b.center()) / period);
  b.lo += shift;
  b.hi += shift;
  return a.lo <= b.hi && b.lo <= a.hi;
}

}  // namespace

std::string to_string(Taxonomy t) {
  switch (t) {
    case Taxonomy::NondegenerateMax: return "NondegenerateMax";
    case Taxonomy::FiniteDegenerateMax: return "FiniteDegenerateMax";
    case Taxonomy::InflectionTransmission: return "InflectionTransmission";
    case Taxonomy::InfinitelyDegenerateMax: return "InfinitelyDegenerateMax";
    case Taxonomy::CylinderMax: return "CylinderMax";
    case Taxonomy::CylinderInflection: return "CylinderInflection";
    case Taxonomy::WeaklyStableMin: return "WeaklyStableMin";
    case Taxonomy::GlobalCylinder: return "GlobalCylinder";
  }
  return "Unknown";
}

CriticalScan find_critical_intervals(const EffectivePotential& pot,
                                     const CriticalScanOptions& opts) {
  if (opts.grid_size < (1 << 12))
    throw InputError("find_critical_intervals: grid_size must be >= 4096");
  if (!(opts.tol > 0.0 && opts.tol < 1e-3))
    throw InputError("find_critical_intervals: tol must lie in (0, 1e-3)");

  const int n = opts.grid_size;
  const double L = pot.period();
  const double dx = L / n;
  std::vector<double> d(n);
  double maxd = 0.0;
  for (int j = 0; j < n; ++j) {
    d[j] = pot.v0_jet(j * dx).d1;
    maxd = std::max(maxd, std::abs(d[j]));
  }

  CriticalScan scan;
  if (maxd < kFlatProfileFloor) {
    CriticalElement e;
    e.interval = {0.0, L};
    e.level = pot.v0(0.0);
    e.isolated = false;
    e.taxonomy = Taxonomy::GlobalCylinder;
    e.left_sign = e.right_sign = 0;
    e.classified = true;
    scan.elements.push_back(e);
    scan.values.values = {e.level};
    scan.values.components_per_value = {1};
    return scan;
  }

  const double thresh = opts.tol * maxd;
  auto flat = [&](int j) { return std::abs(d[((j % n) + n) % n]) <= thresh; };
  auto node = [&](int j) { return j * dx; };  // unwrapped coordinate
  auto dv = [&](int j) { return d[((j % n) + n) % n]; };

  int start = 0;
  while (flat(start)) ++start;  // maxd > 0 guarantees termination

  std::vector<CriticalElement> found;
  auto add_point = [&](double x) {
    CriticalElement e;
    const double xr = wrap_positive(x, L);
    e.interval = {xr, xr};
    e.isolated = true;
    found.push_back(e);
  };
  auto add_interval = [&](Interval iv) {
    CriticalElement e;
    e.interval = iv;
    e.isolated = false;
    found.push_back(e);
  };

  for (int j = start; j < start + n;) {
    if (!flat(j)) {
      // Simple sign change between two non-flat neighbours.
      if (!flat(j + 1) && sign_of(dv(j)) * sign_of(dv(j + 1)) < 0)
        add_point(bisect_derivative(pot, node(j), node(j + 1)));
      ++j;
      continue;
    }
    int j1 = j;
    while (flat(j1 + 1)) ++j1;
    const double xl = node(j - 1), xr = node(j1 + 1);
    const Interval run{node(j), node(j1)};
    j = j1 + 1;

    if (const auto& pieces = pot.curve().flat_pieces(); pieces) {
      bool matched = false;
      for (const auto& piece : *pieces) {
        if (arcs_overlap(Interval{xl, xr}, piece, L)) {
          add_interval(piece);
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }

    // Exactly-zero plateau inside the run (flat shoulders underflow to 0).
    int z0 = -1, z1 = -1;
    for (int k = static_cast<int>(std::lround(run.lo / dx)); k <= static_cast<int>(std::lround(run.hi / dx)); ++k) {
      if (dv(k) == 0.0) {
        if (z0 < 0) z0 = k;
        z1 = k;
      } else if (z0 >= 0) {
        break;
      }
    }
    if (z0 >= 0) {
      const double le = bisect_zero_edge(pot, node(z0), node(z0 - 1));
      const double re = bisect_zero_edge(pot, node(z1), node(z1 + 1));
      const bool unknown_structure = !pot.curve().flat_pieces().has_value();
      if (unknown_structure && re - le > 4.0 * dx) {
        add_interval({le, re});
      } else {
        add_point(0.5 * (le + re));
      }
      continue;
    }
    if (sign_of(dv(j1 + 1)) * sign_of(d[((static_cast<int>(std::lround(xl / dx)) % n) + n) % n]) < 0) {
      add_point(bisect_derivative(pot, xl, xr));
    } else {
      add_point(golden_min_abs_derivative(pot, xl, xr));
    }
  }

  for (auto& e : found) e.level = pot.v0(e.interval.center());
  std::sort(found.begin(), found.end(), [&](const CriticalElement& a, const CriticalElement& b) {
    return wrap_positive(a.interval.center(), L) < wrap_positive(b.interval.center(), L);
  });
  scan.elements = std::move(found);

  // Cluster levels.
  auto [vmin, vmax] = pot.v0_range();
  const double gap = opts.tol * (vmax - vmin);
  std::vector<double> levels;
  for (const auto& e : scan.elements) levels.push_back(e.level);
  std::sort(levels.begin(), levels.end());
  for (double v : levels) {
    if (!scan.values.values.empty() && v - scan.values.values.back() <= gap) {
      ++scan.values.components_per_value.back();
    } else {
      scan.values.values.push_back(v);
      scan.values.components_per_value.push_back(1);
    }
  }
  scan.values.finite = static_cast<int>(scan.elements.size()) <= opts.cap;
  return scan;
}

VanishingOrder vanishing_order(const EffectivePotential& pot, double x0, int max_order,
                               double tol) {
  if (max_order < 2 || max_order > 10)
    throw InputError("vanishing_order: max_order must lie in [2, 10]");
  const double maxd = max_abs_dv0(pot, 1024);
  const double slope_here = std::abs(pot.v0_jet(x0).d1);
  if (slope_here > std::max(1e-6, 100.0 * tol) * maxd)
    throw ClassificationError("vanishing_order: x0 is not a critical point of V0");

  auto [vmin, vmax] = pot.v0_range();
  const double level = pot.v0(x0);
  const double noise = 1e3 * kEps * std::max(std::abs(level), vmax - vmin);

  constexpr double kFirstProbe = 0.5;
  std::vector<double> dev;
  for (int j = 0; j < 40; ++j) {
    const double delta = kFirstProbe * std::ldexp(1.0, -j);
    const double g =
        0.5 * (std::abs(pot.v0(x0 + delta) - level) + std::abs(pot.v0(x0 - delta) - level));
    if (!(g > noise)) break;
    dev.push_back(g);
  }
  if (dev.size() < 2) return {};
  // Local power from the two smallest resolved probes.
  const double slope = std::log2(dev[dev.size() - 2] / dev.back());
  if (slope > max_order + 0.5) return {};
  return {std::max(2, static_cast<int>(std::lround(slope)))};
}

CriticalElement classify_element(const EffectivePotential& pot, const CriticalElement& stub,
                                 const VanishingOrder& order, double scan_radius) {
  CriticalElement e = stub;
  if (e.taxonomy == Taxonomy::GlobalCylinder && e.classified) return e;
  e.vanishing = order;
  const double maxd = max_abs_dv0(pot, 1024);
  const double floor = 1e-12 * maxd;

  auto side_sign = [&](double edge, double dir) {
    int sgn = 0;
    for (int i = 0; i < 48; ++i) {
      const double delta = scan_radius * std::ldexp(1.0, -i);
      const double v = pot.v0_jet(edge + dir * delta).d1;
      if (std::abs(v) <= floor) continue;
      const int s = sign_of(v);
      if (sgn != 0 && s != sgn)
        throw ClassificationError("classify_element: non-monotone shoulder near x = " +
                                  std::to_string(edge) + " within scan radius");
      sgn = s;
    }
    return sgn;
  };
  e.left_sign = side_sign(e.interval.lo, -1.0);
  e.right_sign = side_sign(e.interval.hi, +1.0);
  if (e.left_sign == 0 || e.right_sign == 0)
    throw ClassificationError("classify_element: V0' vanishes throughout the scan radius");

  const bool is_max = e.left_sign > 0 && e.right_sign < 0;
  const bool is_min = e.left_sign < 0 && e.right_sign > 0;
  const bool monotone = e.left_sign == e.right_sign;
  const std::optional<int> k = e.isolated ? order.k : std::nullopt;

  if (is_min) {
    e.taxonomy = Taxonomy::WeaklyStableMin;
    e.order = (k && *k % 2 == 0) ? *k / 2 : 0;
  } else if (is_max) {
    if (!e.isolated) {
      e.taxonomy = Taxonomy::CylinderMax;
    } else if (!k) {
      e.taxonomy = Taxonomy::InfinitelyDegenerateMax;
    } else if (*k % 2 != 0) {
      throw ClassificationError("classify_element: odd vanishing order at a local maximum");
    } else {
      e.order = *k / 2;
      e.taxonomy = e.order == 1 ? Taxonomy::NondegenerateMax : Taxonomy::FiniteDegenerateMax;
    }
  } else if (monotone) {
    if (!k) {
      e.taxonomy = Taxonomy::CylinderInflection;
    } else if (*k % 2 == 0) {
      throw ClassificationError("classify_element: even vanishing order at a monotone point");
    } else {
      e.taxonomy = Taxonomy::InflectionTransmission;
      e.order = (*k - 1) / 2;
    }
  }
  e.classified = true;
  return e;
}

std::vector<CriticalElement> classify_profile(const EffectivePotential& pot,
                                              const CriticalScanOptions& opts, int max_order) {
  CriticalScan scan = find_critical_intervals(pot, opts);
  if (!scan.values.finite)
    throw ClassificationError("classify_profile: more than " + std::to_string(opts.cap) +
                              " critical elements; finite critical set not established");
  std::vector<CriticalElement> out;
  const auto& els = scan.elements;
  const double L = pot.period();
  for (std::size_t i = 0; i < els.size(); ++i) {
    const auto& stub = els[i];
    if (stub.classified) {
      out.push_back(stub);
      continue;
    }
    double radius = 0.5;
    if (els.size() > 1) {
      for (std::size_t j = 0; j < els.size(); ++j) {
        if (j == i) continue;
        // Edge-to-edge circular gap.
        for (double a : {stub.interval.lo, stub.interval.hi})
          for (double b : {els[j].interval.lo, els[j].interval.hi}) {
            double gap = std::abs(wrap_positive(a - b + 0.5 * L, L) - 0.5 * L);
            radius = std::min(radius, 0.5 * gap);
          }
      }
    }
    const VanishingOrder order =
        stub.isolated ? vanishing_order(pot, stub.interval.lo, max_order, opts.tol) : VanishingOrder{};
    out.push_back(classify_element(pot, stub, order, radius));
  }
  return out;
}

std::string PredictedExponent::to_string() const {
  std::string s = std::to_string(num);
  if (den != 1) s += "/" + std::to_string(den);
  if (log_corrected) s += " (log-corrected)";
  if (eta_slack) s += " (+eta)";
  return s;
}

std::optional<PredictedExponent> predicted_exponent(const CriticalElement& elem) {
  auto reduced = [](int num, int den) {
    const int g = std::gcd(num, den);
    return PredictedExponent{num / g, den / g, false, false};
  };
  switch (elem.taxonomy) {
    case Taxonomy::NondegenerateMax: return PredictedExponent{1, 1, true, false};
    case Taxonomy::FiniteDegenerateMax: return reduced(2 * elem.order, elem.order + 1);
    case Taxonomy::InflectionTransmission: return reduced(4 * elem.order + 2, 2 * elem.order + 3);
    case Taxonomy::InfinitelyDegenerateMax:
    case Taxonomy::CylinderMax:
    case Taxonomy::CylinderInflection: return PredictedExponent{2, 1, false, true};
    case Taxonomy::GlobalCylinder:
    case Taxonomy::WeaklyStableMin: return std::nullopt;
  }
  return std::nullopt;
}

bool weakly_unstable(const CriticalElement& elem) {
  return elem.taxonomy != Taxonomy::WeaklyStableMin;
}

}  // namespace revlab
