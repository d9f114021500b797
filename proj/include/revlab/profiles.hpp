#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace revlab {

/// Value and first two derivatives of a scalar function at a point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Closed arc [lo, hi] on a circle; lo may be negative (wraps through 0).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
};

enum class CurveKind { ClosedForm, CompositeWithFlatPieces, GevreyFlat, Sampled };

std::string to_string(CurveKind kind);

/// Evaluates A, A', A'' of a generating curve.
class CurveModel {
 public:
  virtual ~CurveModel() = default;
  virtual Jet eval(double x) const = 0;
};

/// Catalog name plus parameters; serializes to one line of text,
/// e.g. `power-max m=2 period=6.2831853071795862`.
struct ProfileSpec {
  std::string name;
  std::map<std::string, double> params;
  double period = 0.0;

  std::string to_text() const;
  static ProfileSpec parse(const std::string& text);
  bool operator==(const ProfileSpec&) const = default;
};

/// Periodic positive profile A(x) of a surface of revolution with metric
/// dx^2 + A(x)^2 dtheta^2. Immutable; copies share the underlying model.
class GeneratingCurve {
 public:
  GeneratingCurve(std::shared_ptr<const CurveModel> model, double period, CurveKind kind,
                  std::optional<std::vector<Interval>> flat_pieces = std::nullopt,
                  std::optional<ProfileSpec> spec = std::nullopt);

  double period() const { return period_; }
  CurveKind kind() const { return kind_; }
  double epsilon_floor() const { return epsilon_floor_; }

  Jet jet(double x) const { return model_->eval(x); }
  double A(double x) const { return model_->eval(x).value; }

  /// Exactly-constant pieces of A known by construction. nullopt means
  /// unknown (sampled input); an empty vector certifies there are none.
  const std::optional<std::vector<Interval>>& flat_pieces() const { return flat_pieces_; }
  const std::optional<ProfileSpec>& spec() const { return spec_; }

 private:
  std::shared_ptr<const CurveModel> model_;
  double period_;
  CurveKind kind_;
  std::optional<std::vector<Interval>> flat_pieces_;
  std::optional<ProfileSpec> spec_;
  double epsilon_floor_ = 0.0;
};

/// Result of checking a curve against its invariants on a validation grid.
struct CurveValidation {
  double min_A = 0.0;
  double max_A = 0.0;
  double periodicity_error = 0.0;   // max |A(x) - A(x+L)| / max A
  double derivative_error = 0.0;    // max mismatch of FD(A) vs A', FD(A') vs A''
  bool derivative_checked = false;  // false for sampled curves
  bool ok = false;
};

CurveValidation validate(const GeneratingCurve& curve, int grid_size = 1 << 14);

/// Builds A = v0^{-1/2} with A', A'' by the chain rule. Throws InputError on a
/// non-positive v0 sample (message carries x) or when v0 is not period-periodic.
GeneratingCurve construct_from_v0(std::function<Jet(double)> v0, double period,
                                  CurveKind kind = CurveKind::ClosedForm,
                                  std::optional<std::vector<Interval>> flat_pieces = std::nullopt,
                                  std::optional<ProfileSpec> spec = std::nullopt);

/// Same, from values only: v0 is sampled on `samples` points and its
/// derivatives are obtained spectrally.
GeneratingCurve construct_from_v0(std::function<double(double)> v0, double period,
                                  int samples = 1 << 12);

/// Catalog of model profiles. Names: flat, nondeg, power-max (m >= 2),
/// inflection (m2 >= 1), cylinder (0 < a < period/4, p >= 1), gevrey-flat (p >= 1).
GeneratingCurve catalog_profile(const std::string& name,
                                const std::map<std::string, double>& params = {});
GeneratingCurve catalog_profile(const ProfileSpec& spec);

/// Names accepted by catalog_profile.
const std::vector<std::string>& catalog_names();

/// Model flat function exp(-1/t^p) for t > 0 and 0 otherwise, with two derivatives.
Jet gevrey_flat_model(double t, double p);

/// Periodic curve from uniform samples of A (trigonometric interpolation,
/// spectral derivatives).
GeneratingCurve sampled_curve(std::vector<double> samples, double period);

/// CSV with header `x,A,dA,d2A`; reading uses the x and A columns.
void write_curve_csv(const GeneratingCurve& curve, int samples, std::ostream& out);
GeneratingCurve read_curve_csv(std::istream& in);

}  // namespace revlab
