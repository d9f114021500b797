// Command-line front end: catalog, classify, spectrum, gap-rate, band-mass,
// dichotomy, verify-all. Exit codes: 0 ok, 1 scientific FAIL, 2 config
// error, 3 resolution or critical-set diagnostic.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "revlab/acceptance.hpp"
#include "revlab/errors.hpp"
#include "revlab/io.hpp"

using namespace revlab;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFail = 1, kConfig = 2, kDiagnostic = 3 };

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string profile;
  int grid = 0;
  double hmin = 0.0, hmax = 0.0;
  std::vector<std::string> bands;
  bool json = false, csv = false;
  int dump = 0;
};

RunConfig build_config(const Options& opt) {
  RunConfig cfg = opt.config_path.empty() ? RunConfig{} : RunConfig::load(opt.config_path);
  if (!opt.profile.empty()) {
    const ProfileSpec spec = ProfileSpec::parse(opt.profile);
    cfg.profile = spec.name;
    cfg.params = spec.params;
    cfg.curve_csv.clear();
  }
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (opt.grid) cfg.n = opt.grid;
  if (opt.hmin > 0.0) cfg.h_min = opt.hmin;
  if (opt.hmax > 0.0) cfg.h_max = opt.hmax;
  if (!opt.bands.empty()) {
    cfg.bands.clear();
    int i = 0;
    for (const auto& text : opt.bands) {
      std::stringstream ss(text);
      std::string a, b, extra;
      if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || std::getline(ss, extra, ','))
        throw InputError("--band expects a,b; got '" + text + "'");
      try {
        cfg.bands.push_back({std::stod(a), std::stod(b), "band" + std::to_string(++i)});
      } catch (const std::exception&) {
        throw InputError("--band expects two numbers; got '" + text + "'");
      }
    }
  }
  if (opt.json && opt.csv) throw InputError("--json and --csv are exclusive");
  if (opt.json) cfg.format = "json";
  if (opt.csv) cfg.format = "csv";
  cfg.validate();
  return cfg;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.out_dir) / name; }

void emit_json(const RunConfig& cfg, const std::string& name, json body) {
  json doc = provenance(cfg);
  for (auto& [k, v] : body.items()) doc[k] = v;
  write_atomic(out_path(cfg, name), doc.dump(2) + "\n");
  std::cout << "wrote " << out_path(cfg, name).string() << "\n";
}

void emit_csv(const RunConfig& cfg, const std::string& name, const std::string& body) {
  write_atomic(out_path(cfg, name), csv_preamble(cfg) + body);
  std::cout << "wrote " << out_path(cfg, name).string() << "\n";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- subcommands -----------------------------------------------------------

int cmd_catalog(const RunConfig& cfg) {
  json list = json::array();
  std::string csv = "name,spec,kind\n";
  for (const auto& name : catalog_names()) {
    const GeneratingCurve c = catalog_profile(name);
    const std::string spec = c.spec() ? c.spec()->to_text() : name;
    list.push_back({{"name", name}, {"spec", spec}, {"kind", to_string(c.kind())}});
    csv += name + "," + spec + "," + to_string(c.kind()) + "\n";
    std::cout << spec << "\n";
  }
  if (cfg.format == "csv") emit_csv(cfg, "catalog.csv", csv);
  else emit_json(cfg, "catalog.json", {{"profiles", list}});
  return kOk;
}

std::vector<CriticalElement> classify_cfg(const RunConfig& cfg, const EffectivePotential& pot) {
  return classify_profile(pot, cfg.scan_options(), cfg.max_order);
}

int cmd_classify(const RunConfig& cfg) {
  const EffectivePotential pot(cfg.curve());
  const auto els = classify_cfg(cfg, pot);
  json arr = json::array();
  std::string csv = "lo,hi,level,taxonomy,order,vanishing_order,predicted_exponent,log_corrected\n";
  for (const auto& e : els) {
    arr.push_back(to_json(e));
    const auto p = predicted_exponent(e);
    csv += num(e.interval.lo) + "," + num(e.interval.hi) + "," + num(e.level) + "," + to_string(e.taxonomy) +
           "," + std::to_string(e.order) + "," + (e.vanishing.k ? std::to_string(*e.vanishing.k) : "inf") + "," +
           (p ? num(p->value()) : "") + "," + (p && p->log_corrected ? "true" : "false") + "\n";
    std::cout << to_string(e.taxonomy) << " [" << e.interval.lo << ", " << e.interval.hi << "] level " << e.level
              << (p ? " exponent " + p->to_string() : "") << "\n";
  }
  if (cfg.format == "csv") emit_csv(cfg, "classify.csv", csv);
  else emit_json(cfg, "classify.json", {{"profile", cfg.profile.empty() ? cfg.curve_csv : cfg.profile}, {"elements", arr}});
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg, int dump) {
  const EffectivePotential pot(cfg.curve());
  const Grid grid = Grid::make(cfg.n, pot.period());
  SurfaceSpectrumOptions o;
  o.scheme = cfg.scheme;
  o.vectors = dump > 0;
  const SurfaceSpectrum s = surface_spectrum(pot, cfg.k_max, cfg.lambda_max, grid, o);
  std::string csv = "k,lambda_sq,residual,eta,psi_class\n";
  for (const auto& m : s.modes)
    csv += std::to_string(m.k) + "," + num(m.lambda_sq) + "," + num(m.residual) + "," + num(m.eta) + "," +
           to_string(m.psi_class) + "\n";
  emit_csv(cfg, "spectrum.csv", csv);
  if (dump > 0) {
    int written = 0;
    for (const auto& m : s.modes) {
      if (m.k < 0) continue;
      std::ostringstream bin;
      write_mode_dump(m, bin);
      write_atomic(out_path(cfg, "modes/mode_" + std::to_string(written) + ".bin"), bin.str());
      if (++written >= dump) break;
    }
    std::cout << "wrote " << written << " mode dumps under " << out_path(cfg, "modes").string() << "\n";
  }
  emit_json(cfg, "spectrum.json", {{"modes", s.modes.size()}, {"rejected", s.rejected},
                                   {"resolution_warning", s.resolution_warning}, {"scheme", to_string(cfg.scheme)}});
  std::cout << s.modes.size() << " modes, " << s.rejected << " rejected\n";
  return kOk;
}

struct RateOutcome {
  json reports = json::array();
  std::string csv = "element,h,g,n,rank\n";
  bool any_fail = false;
};

RateOutcome run_rates(const RunConfig& cfg, const EffectivePotential& pot, const std::vector<CriticalElement>& els) {
  RateOutcome out;
  const auto hs = cfg.h_sweep();
  int idx = 0;
  for (const auto& e : els) {
    const auto pred = predicted_exponent(e);
    if (!pred) continue;
    const GapSweep s = gap_sweep(pot, e, e.level, hs, cfg.grid_policy(), cfg.window_for(e), cfg.theta, cfg.scheme);
    for (std::size_t i = 0; i < s.h.size(); ++i)
      out.csv += std::to_string(idx) + "," + num(s.h[i]) + "," + num(s.g[i]) + "," + std::to_string(s.n[i]) + "," +
                 std::to_string(s.rank[i]) + "\n";
    json r;
    r["element"] = idx;
    r["critical_element"] = to_json(e);
    r["resolution_warning"] = s.resolution_warning;
    try {
      const RateFit pure = fit_rate(s.h, s.g, RateModel::PurePower);
      const RateFit logc = fit_rate(s.h, s.g, RateModel::LogCorrected);
      const RateVerdict v = judge_rate(pure, logc, pred);
      r["exponent"] = pure.exponent;
      r["log_gamma"] = logc.log_gamma;
      r["residual_rms"] = pure.residual_rms;
      r["predicted"] = pred->value();
      r["verdict"] = to_string(v.status);
      r["detail"] = v.detail;
      r["fit_pure"] = to_json(pure);
      r["fit_log_corrected"] = to_json(logc);
      out.any_fail = out.any_fail || v.status == RateStatus::Fail;
      std::cout << to_string(e.taxonomy) << " at " << e.interval.center() << ": " << to_string(v.status) << " "
                << v.detail << "\n";
    } catch (const InputError& err) {
      r["verdict"] = "UNRELIABLE";
      r["detail"] = err.what();
      std::cout << to_string(e.taxonomy) << " at " << e.interval.center() << ": UNRELIABLE " << err.what() << "\n";
    }
    out.reports.push_back(r);
    ++idx;
  }
  return out;
}

int cmd_gap_rate(const RunConfig& cfg) {
  const EffectivePotential pot(cfg.curve());
  const RateOutcome r = run_rates(cfg, pot, classify_cfg(cfg, pot));
  emit_csv(cfg, "gap_rate.csv", r.csv);
  emit_json(cfg, "gap_rate.json", {{"fits", r.reports}});
  return r.any_fail ? kFail : kOk;
}

int cmd_band_mass(const RunConfig& cfg) {
  const EffectivePotential pot(cfg.curve());
  const Grid grid = Grid::make(cfg.n, pot.period());
  SurfaceSpectrumOptions o;
  o.scheme = cfg.scheme;
  o.include_negative_k = false;
  const SurfaceSpectrum s = surface_spectrum(pot, cfg.k_max, cfg.lambda_max, grid, o);
  std::string csv = "k,lambda,band,mass_flat,mass_vol\n";
  json rows = json::array();
  for (const auto& m : s.modes) {
    if (m.lambda() < cfg.lambda_min) continue;
    for (const auto& b : cfg.bands) {
      const double mf = band_mass(m, b, Measure::Flat, pot), mv = band_mass(m, b, Measure::Volume, pot);
      csv += std::to_string(m.k) + "," + num(m.lambda()) + "," + b.label + "," + num(mf) + "," + num(mv) + "\n";
      rows.push_back({{"k", m.k}, {"lambda", m.lambda()}, {"band", b.label}, {"mass_flat", mf}, {"mass_vol", mv}});
    }
  }
  if (cfg.format == "json") emit_json(cfg, "band_mass.json", {{"rows", rows}});
  else emit_csv(cfg, "band_mass.csv", csv);
  return kOk;
}

struct DichotomyOutcome {
  json reports = json::array();
  bool any_fail = false;
};

DichotomyOutcome run_dichotomy(const RunConfig& cfg, const EffectivePotential& pot,
                               const std::vector<CriticalElement>& els) {
  DichotomyOutcome out;
  const Grid grid = Grid::make(cfg.n, pot.period());
  for (const auto& fam : standard_families(pot, els, grid, cfg.lambda_min, cfg.lambda_max)) {
    for (const auto& b : cfg.bands) {
      const DichotomyReport r = dichotomy_report(fam, b, pot, cfg.dichotomy_options());
      out.any_fail = out.any_fail || r.verdict == Verdict::Fail;
      out.reports.push_back(to_json(r));
      std::cout << fam.selector << " x " << b.label << ": " << to_string(r.branch);
      if (r.gamma_fit) std::cout << " gamma=" << r.gamma_fit->exponent;
      std::cout << " " << to_string(r.verdict) << "\n";
    }
  }
  return out;
}

int cmd_dichotomy(const RunConfig& cfg) {
  const EffectivePotential pot(cfg.curve());
  const DichotomyOutcome d = run_dichotomy(cfg, pot, classify_cfg(cfg, pot));
  emit_json(cfg, "dichotomy.json", {{"reports", d.reports}});
  return d.any_fail ? kFail : kOk;
}

int cmd_verify_all(const RunConfig& cfg, bool full_suite) {
  if (full_suite) {
    const auto results = run_acceptance({}, &std::cout);
    json arr = json::array();
    bool all = true;
    for (const auto& r : results) {
      arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds}, {"detail", r.detail}});
      all = all && r.pass;
    }
    emit_json(cfg, "verify_all.json", {{"suite", "acceptance"}, {"criteria", arr}, {"pass", all}});
    return all ? kOk : kFail;
  }
  const EffectivePotential pot(cfg.curve());
  const auto els = classify_cfg(cfg, pot);
  json elements = json::array();
  for (const auto& e : els) elements.push_back(to_json(e));
  const RateOutcome rates = run_rates(cfg, pot, els);
  const DichotomyOutcome dich = run_dichotomy(cfg, pot, els);
  const bool pass = !rates.any_fail && !dich.any_fail;
  emit_json(cfg, "verify_all.json", {{"suite", "profile"},
                                     {"profile", cfg.profile.empty() ? cfg.curve_csv : cfg.profile},
                                     {"elements", elements},
                                     {"rates", rates.reports},
                                     {"dichotomy", dich.reports},
                                     {"pass", pass}});
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for surfaces of revolution"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "Run configuration file");
  app.add_option("--out", opt.out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--profile", opt.profile, "Catalog profile, e.g. \"power-max m=3\"");
  app.add_option("--grid", opt.grid, "Grid size n for fixed-grid subcommands");
  app.add_option("--hmin", opt.hmin, "Smallest h of the sweep");
  app.add_option("--hmax", opt.hmax, "Largest h of the sweep");
  app.add_option("--band", opt.bands, "Band a,b (repeatable)")->allow_extra_args(false);
  app.add_flag("--json", opt.json, "JSON output where a choice exists");
  app.add_flag("--csv", opt.csv, "CSV output where a choice exists");

  const std::vector<std::pair<std::string, std::string>> subs{
      {"catalog", "List catalog profiles"},
      {"classify", "Classify critical elements of V0"},
      {"spectrum", "Surface spectrum up to k_max, lambda_max"},
      {"gap-rate", "Restricted sigma_min sweeps and rate fits"},
      {"band-mass", "Band masses of surface modes"},
      {"dichotomy", "Band-mass dichotomy reports"},
      {"verify-all", "Acceptance suite, or profile checks with --config/--profile"}};
  std::map<std::string, CLI::App*> sub;
  for (const auto& [name, help] : subs) sub[name] = app.add_subcommand(name, help);
  sub["spectrum"]->add_option("--dump", opt.dump, "Write binary dumps of the first N modes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  RunConfig cfg;
  try {
    cfg = build_config(opt);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }

  try {
    if (*sub["catalog"]) return cmd_catalog(cfg);
    if (*sub["classify"]) return cmd_classify(cfg);
    if (*sub["spectrum"]) return cmd_spectrum(cfg, opt.dump);
    if (*sub["gap-rate"]) return cmd_gap_rate(cfg);
    if (*sub["band-mass"]) return cmd_band_mass(cfg);
    if (*sub["dichotomy"]) return cmd_dichotomy(cfg);
    if (*sub["verify-all"]) return cmd_verify_all(cfg, opt.config_path.empty() && opt.profile.empty());
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfig;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution diagnostic: " << e.what() << "\n";
    return kDiagnostic;
  } catch (const ClassificationError& e) {
    std::cerr << "critical-set diagnostic: " << e.what() << "\n";
    return kDiagnostic;
  }
  return kOk;
}
