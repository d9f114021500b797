#include "revlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "revlab/errors.hpp"
#include "revlab/fourier.hpp"

namespace revlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kFloorGrid = 1 << 16;
constexpr double kFloorMargin = 1e-9;

// Representative of x in [-L/2, L/2).
double wrap_centered(double x, double period) {
  return x - period * std::floor(x / period + 0.5);
}

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class FlatModel final : public CurveModel {
 public:
  Jet eval(double) const override { return {1.0, 0.0, 0.0}; }
};

// A = 2 + cos x.
class NondegModel final : public CurveModel {
 public:
  Jet eval(double x) const override { return {2.0 + std::cos(x), -std::sin(x), -std::cos(x)}; }
};

// A = v0^{-1/2} for a supplied v0 jet.
class FromV0Model final : public CurveModel {
 public:
  explicit FromV0Model(std::function<Jet(double)> v0) : v0_(std::move(v0)) {}
  Jet eval(double x) const override {
    const Jet v = v0_(x);
    const double r = 1.0 / std::sqrt(v.value);  // v^{-1/2}
    const double r3 = r * r * r;
    const double r5 = r3 * r * r;
    return {r, -0.5 * r3 * v.d1, 0.75 * r5 * v.d1 * v.d1 - 0.5 * r3 * v.d2};
  }

 private:
  std::function<Jet(double)> v0_;
};

class SampledModel final : public CurveModel {
 public:
  SampledModel(std::vector<double> samples, double period) : interp_(samples, period) {}
  Jet eval(double x) const override {
    auto [f, df, d2f] = interp_.eval(x);
    return {f, df, d2f};
  }

 private:
  TrigInterpolant interp_;
};

// V0 = 1 - (3/4) sin^{2m}(x/2).
Jet power_max_v0(double x, int m) {
  const double s = std::sin(0.5 * x), c = std::cos(0.5 * x);
  const double v = 1.0 - 0.75 * ipow(s, 2 * m);
  const double d1 = -0.75 * m * ipow(s, 2 * m - 1) * c;
  const double d2 = -0.375 * m * ((2 * m - 1) * ipow(s, 2 * m - 2) * c * c - ipow(s, 2 * m));
  return {v, d1, d2};
}

// V0 = 1/2 - (1/4) sin^{2 m2 + 1}(x).
Jet inflection_v0(double x, int m2) {
  const int q = 2 * m2 + 1;
  const double s = std::sin(x), c = std::cos(x);
  const double v = 0.5 - 0.25 * ipow(s, q);
  const double d1 = -0.25 * q * ipow(s, q - 1) * c;
  const double d2 = -0.25 * q * ((q - 1) * ipow(s, q - 2) * c * c - ipow(s, q));
  return {v, d1, d2};
}

// V0 = 1 - (3/4) F(u - u_a) / F(2 - u_a), u = 2|sin(x/2)|, F the flat model.
// Flat (V0 = 1) exactly on |x| <= a; nondegenerate minimum 1/4 at x = pi.
Jet shouldered_v0(double x, double a, double p) {
  const double xr = wrap_centered(x, kTwoPi);
  const double sgn = xr < 0.0 ? -1.0 : 1.0;
  const double ua = 2.0 * std::sin(0.5 * a);
  const double u = 2.0 * std::sin(0.5 * std::abs(xr));
  const double du = sgn * std::cos(0.5 * xr);
  const double d2u = -0.5 * std::sin(0.5 * std::abs(xr));
  const double norm = gevrey_flat_model(2.0 - ua, p).value;
  const Jet F = gevrey_flat_model(u - ua, p);
  return {1.0 - 0.75 * F.value / norm, -0.75 * F.d1 * du / norm,
          -0.75 * (F.d2 * du * du + F.d1 * d2u) / norm};
}

double require_param(const std::map<std::string, double>& params, const std::string& key,
                     double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int require_integer(double v, const std::string& what, int min_value) {
  if (!std::isfinite(v) || std::floor(v) != v || v < min_value)
    throw InputError(what + " must be an integer >= " + std::to_string(min_value));
  return static_cast<int>(v);
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> allowed, const std::string& name) {
  for (const auto& [key, value] : params) {
    if (key == "period") continue;
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InputError("catalog profile '" + name + "' has no parameter '" + key + "'");
  }
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::ClosedForm: return "closed-form";
    case CurveKind::CompositeWithFlatPieces: return "composite-with-flat-pieces";
    case CurveKind::GevreyFlat: return "gevrey-flat";
    case CurveKind::Sampled: return "sampled";
  }
  return "unknown";
}

Jet gevrey_flat_model(double t, double p) {
  if (!(t > 0.0)) return {};
  const double inv = std::pow(t, -p);
  if (inv > 745.0) return {};  // exp underflows; avoid inf * 0
  const double F = std::exp(-inv);
  const double d1 = p * inv / t * F;
  const double d2 = F * (p * p * inv * inv / (t * t) - p * (p + 1.0) * inv / (t * t));
  return {F, d1, d2};
}

std::string ProfileSpec::to_text() const {
  std::string out = name;
  for (const auto& [key, value] : params) out += " " + key + "=" + format_double(value);
  out += " period=" + format_double(period);
  return out;
}

ProfileSpec ProfileSpec::parse(const std::string& text) {
  std::istringstream in(text);
  ProfileSpec spec;
  if (!(in >> spec.name)) throw InputError("profile spec: missing name");
  std::string token;
  bool have_period = false;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
      throw InputError("profile spec: expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw InputError("profile spec: bad number '" + val + "' for '" + key + "'");
    }
    if (key == "period") {
      spec.period = v;
      have_period = true;
    } else {
      spec.params[key] = v;
    }
  }
  if (!have_period) spec.period = kTwoPi;
  return spec;
}

GeneratingCurve::GeneratingCurve(std::shared_ptr<const CurveModel> model, double period,
                                 CurveKind kind, std::optional<std::vector<Interval>> flat_pieces,
                                 std::optional<ProfileSpec> spec)
    : model_(std::move(model)),
      period_(period),
      kind_(kind),
      flat_pieces_(std::move(flat_pieces)),
      spec_(std::move(spec)) {
  if (!model_) throw InputError("GeneratingCurve: null model");
  if (!(period_ > 0.0) || !std::isfinite(period_))
    throw InputError("GeneratingCurve: period must be positive");
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kFloorGrid; ++j) {
    const double x = period_ * j / kFloorGrid;
    const double a = model_->eval(x).value;
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InputError("GeneratingCurve: A(x) must be positive; A(" + format_double(x) +
                       ") = " + format_double(a));
    }
    lo = std::min(lo, a);
  }
  epsilon_floor_ = lo - kFloorMargin;
  if (!(epsilon_floor_ > 0.0)) throw InputError("GeneratingCurve: A too close to zero");
}

CurveValidation validate(const GeneratingCurve& curve, int grid_size) {
  CurveValidation r;
  const double L = curve.period();
  const double s = L / grid_size;
  r.min_A = std::numeric_limits<double>::infinity();
  r.max_A = 0.0;
  double max_dA = 0.0, max_d2A = 0.0;
  for (int j = 0; j < grid_size; ++j) {
    const Jet a = curve.jet(j * s);
    r.min_A = std::min(r.min_A, a.value);
    r.max_A = std::max(r.max_A, a.value);
    max_dA = std::max(max_dA, std::abs(a.d1));
    max_d2A = std::max(max_d2A, std::abs(a.d2));
  }
  for (int j = 0; j < grid_size; ++j) {
    const double x = j * s;
    r.periodicity_error =
        std::max(r.periodicity_error, std::abs(curve.A(x) - curve.A(x + L)) / r.max_A);
  }
  r.derivative_checked = curve.kind() != CurveKind::Sampled;
  if (r.derivative_checked) {
    // Fourth-order centered differences.
    auto fd = [&](double x, auto get) {
      return (get(x - 2 * s) - 8.0 * get(x - s) + 8.0 * get(x + s) - get(x + 2 * s)) / (12.0 * s);
    };
    const auto val = [&](double x) { return curve.jet(x).value; };
    const auto der = [&](double x) { return curve.jet(x).d1; };
    const double scale1 = std::max(1.0, max_dA), scale2 = std::max(1.0, max_d2A);
    for (int j = 0; j < grid_size; ++j) {
      const double x = j * s;
      const Jet a = curve.jet(x);
      r.derivative_error = std::max(r.derivative_error, std::abs(fd(x, val) - a.d1) / scale1);
      r.derivative_error = std::max(r.derivative_error, std::abs(fd(x, der) - a.d2) / scale2);
    }
  }
  r.ok = r.min_A >= curve.epsilon_floor() && r.periodicity_error <= 1e-12 &&
         (!r.derivative_checked || r.derivative_error <= 1e-6);
  return r;
}

GeneratingCurve construct_from_v0(std::function<Jet(double)> v0, double period, CurveKind kind,
                                  std::optional<std::vector<Interval>> flat_pieces,
                                  std::optional<ProfileSpec> spec) {
  if (!(period > 0.0)) throw InputError("construct_from_v0: period must be positive");
  constexpr int kCheck = 1 << 14;
  double vmax = 0.0;
  for (int j = 0; j < kCheck; ++j) {
    const double x = period * j / kCheck;
    const double v = v0(x).value;
    if (!(v > 0.0) || !std::isfinite(v))
      throw InputError("construct_from_v0: v0 must be positive; v0(" + format_double(x) +
                       ") = " + format_double(v));
    vmax = std::max(vmax, v);
  }
  for (int j = 0; j < kCheck; ++j) {
    const double x = period * j / kCheck;
    if (std::abs(v0(x).value - v0(x + period).value) > 1e-12 * vmax)
      throw InputError("construct_from_v0: v0 is not periodic with period " +
                       format_double(period) + " (mismatch at x = " + format_double(x) + ")");
  }
  return GeneratingCurve(std::make_shared<FromV0Model>(std::move(v0)), period, kind,
                         std::move(flat_pieces), std::move(spec));
}

GeneratingCurve construct_from_v0(std::function<double(double)> v0, double period, int samples) {
  if (!(period > 0.0)) throw InputError("construct_from_v0: period must be positive");
  if (samples < 16) throw InputError("construct_from_v0: too few samples");
  std::vector<double> vals(samples);
  for (int j = 0; j < samples; ++j) {
    const double x = period * j / samples;
    vals[j] = v0(x);
    if (!(vals[j] > 0.0) || !std::isfinite(vals[j]))
      throw InputError("construct_from_v0: v0 must be positive; v0(" + format_double(x) +
                       ") = " + format_double(vals[j]));
  }
  const double vmax = *std::max_element(vals.begin(), vals.end());
  for (int j = 0; j < samples; ++j) {
    const double x = period * j / samples;
    if (std::abs(v0(x + period) - vals[j]) > 1e-12 * vmax)
      throw InputError("construct_from_v0: v0 is not periodic with period " +
                       format_double(period));
  }
  auto interp = std::make_shared<TrigInterpolant>(vals, period);
  auto jet = [interp](double x) {
    auto [f, df, d2f] = interp->eval(x);
    return Jet{f, df, d2f};
  };
  return GeneratingCurve(std::make_shared<FromV0Model>(jet), period, CurveKind::Sampled);
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"flat",       "nondeg",   "power-max",
                                              "inflection", "cylinder", "gevrey-flat"};
  return names;
}

GeneratingCurve catalog_profile(const std::string& name,
                                const std::map<std::string, double>& params) {
  const double period = require_param(params, "period", kTwoPi);
  if (std::abs(period - kTwoPi) > 1e-12)
    throw InputError("catalog profiles are defined with period 2*pi");
  ProfileSpec spec{name, {}, kTwoPi};

  if (name == "flat") {
    reject_unknown(params, {}, name);
    return GeneratingCurve(std::make_shared<FlatModel>(), kTwoPi, CurveKind::ClosedForm,
                           std::vector<Interval>{{0.0, kTwoPi}}, spec);
  }
  if (name == "nondeg") {
    reject_unknown(params, {}, name);
    return GeneratingCurve(std::make_shared<NondegModel>(), kTwoPi, CurveKind::ClosedForm,
                           std::vector<Interval>{}, spec);
  }
  if (name == "power-max") {
    reject_unknown(params, {"m"}, name);
    const int m = require_integer(require_param(params, "m", 2), "power-max: m", 2);
    spec.params["m"] = m;
    return construct_from_v0([m](double x) { return power_max_v0(x, m); }, kTwoPi,
                             CurveKind::ClosedForm, std::vector<Interval>{}, spec);
  }
  if (name == "inflection") {
    reject_unknown(params, {"m2"}, name);
    const int m2 = require_integer(require_param(params, "m2", 1), "inflection: m2", 1);
    spec.params["m2"] = m2;
    return construct_from_v0([m2](double x) { return inflection_v0(x, m2); }, kTwoPi,
                             CurveKind::ClosedForm, std::vector<Interval>{}, spec);
  }
  if (name == "cylinder") {
    reject_unknown(params, {"a", "p"}, name);
    const double a = require_param(params, "a", 0.5);
    const double p = require_param(params, "p", 2.0);
    if (!(a > 0.0 && a < kTwoPi / 4.0)) throw InputError("cylinder: need 0 < a < period/4");
    if (!(p >= 1.0)) throw InputError("cylinder: need p >= 1");
    spec.params["a"] = a;
    spec.params["p"] = p;
    return construct_from_v0([a, p](double x) { return shouldered_v0(x, a, p); }, kTwoPi,
                             CurveKind::CompositeWithFlatPieces,
                             std::vector<Interval>{{-a, a}}, spec);
  }
  if (name == "gevrey-flat") {
    reject_unknown(params, {"p"}, name);
    const double p = require_param(params, "p", 2.0);
    if (!(p >= 1.0)) throw InputError("gevrey-flat: need p >= 1");
    spec.params["p"] = p;
    return construct_from_v0([p](double x) { return shouldered_v0(x, 0.0, p); }, kTwoPi,
                             CurveKind::GevreyFlat, std::vector<Interval>{}, spec);
  }
  throw InputError("unknown catalog profile '" + name + "'");
}

GeneratingCurve catalog_profile(const ProfileSpec& spec) {
  auto params = spec.params;
  params["period"] = spec.period;
  return catalog_profile(spec.name, params);
}

GeneratingCurve sampled_curve(std::vector<double> samples, double period) {
  if (samples.size() < 16) throw InputError("sampled curve: need at least 16 samples");
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (!(samples[j] > 0.0) || !std::isfinite(samples[j]))
      throw InputError("sampled curve: A must be positive; sample " + std::to_string(j) +
                       " at x = " + format_double(period * j / samples.size()));
  }
  return GeneratingCurve(std::make_shared<SampledModel>(std::move(samples), period), period,
                         CurveKind::Sampled);
}

void write_curve_csv(const GeneratingCurve& curve, int samples, std::ostream& out) {
  out << "x,A,dA,d2A\n";
  char buf[160];
  for (int j = 0; j < samples; ++j) {
    const double x = curve.period() * j / samples;
    const Jet a = curve.jet(x);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x, a.value, a.d1, a.d2);
    out << buf;
  }
}

GeneratingCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("curve csv: empty input");
  if (line.rfind("x,A", 0) != 0) throw InputError("curve csv: header must start with 'x,A'");
  std::vector<double> xs, as;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cx, ca;
    if (!std::getline(row, cx, ',') || !std::getline(row, ca, ','))
      throw InputError("curve csv: malformed row " + std::to_string(lineno));
    try {
      xs.push_back(std::stod(cx));
      as.push_back(std::stod(ca));
    } catch (const std::exception&) {
      throw InputError("curve csv: bad number on row " + std::to_string(lineno));
    }
  }
  if (xs.size() < 16) throw InputError("curve csv: need at least 16 rows");
  const double spacing = xs[1] - xs[0];
  for (std::size_t j = 1; j < xs.size(); ++j) {
    if (std::abs(xs[j] - xs[0] - spacing * j) > 1e-9 * spacing * xs.size())
      throw InputError("curve csv: x column must be a uniform grid starting the period");
  }
  return sampled_curve(std::move(as), spacing * xs.size());
}

}  // namespace revlab
