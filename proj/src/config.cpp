#include "revlab/config.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "revlab/errors.hpp"

namespace revlab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("config: " + key + ": '" + s + "' is not a number");
  }
  if (pos != s.size() || !std::isfinite(v))
    throw InputError("config: " + key + ": '" + s + "' is not a finite number");
  return v;
}

int to_int(const std::string& key, const std::string& s) {
  const double v = to_double(key, s);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InputError("config: " + key + ": '" + s + "' is not an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw InputError("config: " + key + ": expected true or false, got '" + s + "'");
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

}  // namespace

std::vector<BandRegion> default_bands(double period) {
  const double pi = std::numbers::pi;
  const double s = period / (2.0 * pi);
  return {BandRegion::make(s * (pi - 0.5), s * (pi + 0.5), "barrier", period),
          BandRegion::make(-0.5 * s, 0.5 * s, "well", period),
          BandRegion::make(1.0 * s, 2.0 * s, "middle", period)};
}

RunConfig::RunConfig() : bands(default_bands(2.0 * std::numbers::pi)) {}

RunConfig RunConfig::parse(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const std::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  RunConfig c;
  bool bands_seen = false;
  bool name_seen = false;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (item.parents.size() != 1)
      throw InputError("config: key '" + item.name + "' must sit inside exactly one [section]");
    const std::string& sec = item.parents.front();
    const std::string key = sec + "." + item.name;
    const std::string val = join(item.inputs);
    if (item.inputs.empty()) throw InputError("config: " + key + " has no value");

    if (sec == "bands") {
      if (!bands_seen) c.bands.clear();
      bands_seen = true;
      std::vector<std::string> ends;
      std::stringstream ss(val);
      for (std::string part; std::getline(ss, part, ',');) ends.push_back(CLI::detail::trim_copy(part));
      if (ends.size() != 2) throw InputError("config: " + key + ": expected 'a, b'");
      c.bands.push_back({to_double(key, ends[0]), to_double(key, ends[1]), item.name});
      continue;
    }
    if (item.inputs.size() != 1) throw InputError("config: " + key + ": expected a single value");
    if (sec == "profile") {
      if (item.name == "name") {
        c.profile = val;
        name_seen = true;
      }
      else if (item.name == "csv") c.curve_csv = val;
      else c.params[item.name] = to_double(key, val);
    } else if (sec == "grid") {
      if (item.name == "n") c.n = to_int(key, val);
      else if (item.name == "n_min") c.n_min = to_int(key, val);
      else if (item.name == "n_max") c.n_max = to_int(key, val);
      else if (item.name == "points") c.points = to_double(key, val);
      else if (item.name == "scheme") {
        try {
          c.scheme = parse_scheme(val);
        } catch (const InputError& e) {
          throw InputError("config: " + key + ": " + e.what());
        }
      } else throw InputError("config: unknown key " + key);
    } else if (sec == "sweep") {
      if (item.name == "h_min") c.h_min = to_double(key, val);
      else if (item.name == "h_max") c.h_max = to_double(key, val);
      else if (item.name == "h_count") c.h_count = to_int(key, val);
      else if (item.name == "lambda_min") c.lambda_min = to_double(key, val);
      else if (item.name == "lambda_max") c.lambda_max = to_double(key, val);
      else if (item.name == "k_max") c.k_max = to_int(key, val);
      else throw InputError("config: unknown key " + key);
    } else if (sec == "window") {
      if (item.name == "x_pad") c.x_pad = to_double(key, val);
      else if (item.name == "xi_halfwidth") c.xi_halfwidth = to_double(key, val);
      else if (item.name == "taper") c.taper = to_double(key, val);
      else if (item.name == "theta") c.theta = to_double(key, val);
      else if (item.name == "z_window") c.z_window = to_double(key, val);
      else throw InputError("config: unknown key " + key);
    } else if (sec == "tolerances") {
      if (item.name == "crit_tol") c.crit_tol = to_double(key, val);
      else if (item.name == "crit_cap") c.crit_cap = to_int(key, val);
      else if (item.name == "max_order") c.max_order = to_int(key, val);
      else if (item.name == "vanishing_degree") c.vanishing_degree = to_int(key, val);
      else if (item.name == "eps_accept") c.eps_accept = to_double(key, val);
      else if (item.name == "wavefront_threshold") c.wavefront_threshold = to_double(key, val);
      else if (item.name == "uniform_ratio") c.uniform_ratio = to_double(key, val);
      else throw InputError("config: unknown key " + key);
    } else if (sec == "output") {
      if (item.name == "dir") c.out_dir = val;
      else if (item.name == "format") c.format = val;
      else if (item.name == "deterministic") c.deterministic = to_bool(key, val);
      else throw InputError("config: unknown key " + key);
    } else {
      throw InputError("config: unknown section [" + sec + "]");
    }
  }
  if (!c.curve_csv.empty() && !name_seen) c.profile.clear();
  return c;
}

RunConfig RunConfig::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open " + path);
  return parse(in);
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o << "[profile]\n";
  if (!profile.empty()) o << "name = " << profile << "\n";
  if (!curve_csv.empty()) o << "csv = \"" << curve_csv << "\"\n";
  for (const auto& [k, v] : params) o << k << " = " << fmt(v) << "\n";
  o << "\n[grid]\n"
    << "n = " << n << "\nn_min = " << n_min << "\nn_max = " << n_max << "\npoints = " << fmt(points)
    << "\nscheme = " << to_string(scheme) << "\n";
  o << "\n[sweep]\n"
    << "h_min = " << fmt(h_min) << "\nh_max = " << fmt(h_max) << "\nh_count = " << h_count
    << "\nlambda_min = " << fmt(lambda_min) << "\nlambda_max = " << fmt(lambda_max)
    << "\nk_max = " << k_max << "\n";
  o << "\n[bands]\n";
  for (const auto& b : bands) o << b.label << " = \"" << fmt(b.a) << ", " << fmt(b.b) << "\"\n";
  o << "\n[window]\n"
    << "x_pad = " << fmt(x_pad) << "\nxi_halfwidth = " << fmt(xi_halfwidth) << "\ntaper = " << fmt(taper)
    << "\ntheta = " << fmt(theta) << "\nz_window = " << fmt(z_window) << "\n";
  o << "\n[tolerances]\n"
    << "crit_tol = " << fmt(crit_tol) << "\ncrit_cap = " << crit_cap << "\nmax_order = " << max_order
    << "\nvanishing_degree = " << vanishing_degree << "\neps_accept = " << fmt(eps_accept)
    << "\nwavefront_threshold = " << fmt(wavefront_threshold)
    << "\nuniform_ratio = " << fmt(uniform_ratio) << "\n";
  o << "\n[output]\n"
    << "dir = \"" << out_dir << "\"\nformat = " << format
    << "\ndeterministic = " << (deterministic ? "true" : "false") << "\n";
  return o.str();
}

std::string RunConfig::hash() const {
  const std::string text = to_text();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("config hash: SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw InputError("config: " + m); };
  if (profile.empty() == curve_csv.empty()) fail("[profile] needs exactly one of name or csv");
  if (!curve_csv.empty() && !params.empty()) fail("[profile] parameters apply only to catalog names");
  if (!curve_csv.empty() && !std::filesystem::exists(curve_csv))
    fail("profile.csv: file not found: " + curve_csv);
  auto pow2 = [](int v) { return v >= 64 && (v & (v - 1)) == 0; };
  if (!pow2(n)) fail("grid.n must be a power of two >= 64");
  if (!pow2(n_min) || !pow2(n_max) || n_min > n_max) fail("grid.n_min/n_max must be powers of two with n_min <= n_max");
  if (!(points > 0.0)) fail("grid.points must be positive");
  if (!(h_min > 0.0 && h_min < h_max && h_max < 1.0)) fail("sweep: need 0 < h_min < h_max < 1");
  if (h_count < 5) fail("sweep.h_count must be >= 5");
  if (h_max / h_min < 8.0 * (1.0 - 1e-12)) fail("sweep: h_max / h_min must be >= 8");
  if (!(lambda_min > 0.0 && lambda_min < lambda_max)) fail("sweep: need 0 < lambda_min < lambda_max");
  if (k_max < 0) fail("sweep.k_max must be >= 0");
  if (!(x_pad > 0.0 && xi_halfwidth > 0.0)) fail("window: halfwidths must be positive");
  if (!(taper >= 0.0 && taper <= 1.0)) fail("window.taper must lie in [0, 1]");
  if (!(theta > 0.0 && theta <= 1.0)) fail("window.theta must lie in (0, 1]");
  if (!(z_window >= 0.0)) fail("window.z_window must be >= 0");
  if (!(crit_tol > 0.0 && crit_tol < 1e-3)) fail("tolerances.crit_tol must lie in (0, 1e-3)");
  if (crit_cap < 1) fail("tolerances.crit_cap must be >= 1");
  if (max_order < 2 || max_order > 10) fail("tolerances.max_order must lie in [2, 10]");
  if (vanishing_degree < 1) fail("tolerances.vanishing_degree must be >= 1");
  if (!(eps_accept >= 0.0)) fail("tolerances.eps_accept must be >= 0");
  if (!(wavefront_threshold > 0.0 && wavefront_threshold < 1.0)) fail("tolerances.wavefront_threshold must lie in (0, 1)");
  if (!(uniform_ratio >= 1.0)) fail("tolerances.uniform_ratio must be >= 1");
  if (format != "json" && format != "csv") fail("output.format must be json or csv");
  if (!deterministic) fail("output.deterministic cannot be disabled");
  if (out_dir.empty()) fail("output.dir must not be empty");
  if (!curve_csv.empty()) return;  // period known only after loading
  const GeneratingCurve c = curve();
  for (const auto& b : bands) {
    try {
      BandRegion::make(b.a, b.b, b.label, c.period());
    } catch (const InputError& e) {
      fail("bands." + b.label + ": " + e.what());
    }
  }
}

GeneratingCurve RunConfig::curve() const {
  if (!curve_csv.empty()) {
    std::ifstream in(curve_csv);
    if (!in) throw InputError("config: cannot open " + curve_csv);
    return read_curve_csv(in);
  }
  return catalog_profile(profile, params);
}

std::vector<double> RunConfig::h_sweep() const {
  std::vector<double> hs;
  for (int j = 0; j < h_count; ++j)
    hs.push_back(h_max * std::pow(h_min / h_max, static_cast<double>(j) / (h_count - 1)));
  return hs;
}

GridPolicy RunConfig::grid_policy() const { return GridPolicy{n_min, n_max, points}; }

PhaseSpaceWindow RunConfig::window_for(const CriticalElement& elem) const {
  PhaseSpaceWindow w = default_window(elem);
  w.x_halfwidth = 0.5 * elem.interval.length() + x_pad;
  w.xi_halfwidth = xi_halfwidth;
  w.taper = taper;
  return w;
}

CriticalScanOptions RunConfig::scan_options() const {
  CriticalScanOptions o;
  o.tol = crit_tol;
  o.cap = crit_cap;
  return o;
}

DichotomyOptions RunConfig::dichotomy_options() const {
  return DichotomyOptions{vanishing_degree, eps_accept, wavefront_threshold};
}

bool RunConfig::operator==(const RunConfig& o) const { return to_text() == o.to_text(); }

}  // namespace revlab
