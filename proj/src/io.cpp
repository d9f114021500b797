#include "revlab/io.hpp"

#include <unistd.h>

#include <fstream>

#include "revlab/errors.hpp"

namespace revlab {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json provenance(const RunConfig& cfg) {
  return json{{"tool_version", kToolVersion}, {"config_sha256", cfg.hash()}};
}

std::string csv_preamble(const RunConfig& cfg) {
  return std::string("# tool_version=") + kToolVersion + ", config_sha256=" + cfg.hash() + "\n";
}

json to_json(const BandRegion& b) { return json{{"label", b.label}, {"a", b.a}, {"b", b.b}}; }

json to_json(const CriticalElement& e) {
  json j;
  j["interval"] = {e.interval.lo, e.interval.hi};
  j["level"] = e.level;
  j["isolated"] = e.isolated;
  j["taxonomy"] = to_string(e.taxonomy);
  j["order"] = e.order;
  j["vanishing_order"] = e.vanishing.k ? json(*e.vanishing.k) : json(nullptr);
  const auto p = predicted_exponent(e);
  j["predicted_exponent"] = p ? json(p->value()) : json(nullptr);
  j["predicted_exponent_text"] = p ? json(p->to_string()) : json(nullptr);
  j["log_corrected"] = p && p->log_corrected;
  j["eta_slack"] = p && p->eta_slack;
  j["weakly_unstable"] = weakly_unstable(e);
  return j;
}

json to_json(const RateFit& f) {
  return json{{"model", to_string(f.model)},      {"exponent", f.exponent},
              {"log_gamma", f.log_gamma},         {"intercept", f.intercept},
              {"residual_rms", f.residual_rms},   {"reliable", f.reliable},
              {"h_list", f.h_list},               {"g_list", f.g_list}};
}

json to_json(const DichotomyReport& r) {
  json j;
  j["band"] = to_json(r.band);
  j["family"] = r.family;
  j["branch"] = to_string(r.branch);
  j["gamma"] = r.gamma_fit ? json(r.gamma_fit->exponent) : json(nullptr);
  j["gamma_residual_rms"] = r.gamma_fit ? json(r.gamma_fit->residual_rms) : json(nullptr);
  j["gamma_volume"] = r.gamma_volume ? json(*r.gamma_volume) : json(nullptr);
  j["delta_hat"] = r.delta_hat ? json(*r.delta_hat) : json(nullptr);
  j["gamma_trend"] = r.gamma_trend;
  j["wavefront_meets_band"] = r.wavefront_meets_band;
  j["wavefront_proxy_min"] = r.wavefront_min;
  j["wavefront_proxy_max"] = r.wavefront_max;
  j["verdict"] = to_string(r.verdict);
  j["note"] = r.note;
  json members = json::array();
  for (std::size_t i = 0; i < r.masses.size(); ++i)
    members.push_back({{"k", r.ks[i]}, {"lambda", r.lambdas[i]}, {"mass", r.masses[i]}});
  j["members"] = members;
  return j;
}

}  // namespace revlab
