#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "revlab/profiles.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = REVLAB_TEST_TMP;

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + REVLAB_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const fs::path p = kTmp / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("classify nondeg writes the expected elements") {
  const fs::path out = fresh("classify");
  REQUIRE(run("--profile nondeg --out " + out.string() + " classify") == 0);
  const auto doc = nlohmann::json::parse(slurp(out / "classify.json"));
  CHECK(doc.contains("tool_version"));
  CHECK(doc["config_sha256"].get<std::string>().size() == 64);
  const auto& els = doc["elements"];
  REQUIRE(els.size() == 2);
  int maxima = 0, minima = 0;
  for (const auto& e : els) {
    if (e["taxonomy"] == "NondegenerateMax") {
      ++maxima;
      CHECK(e["predicted_exponent"].get<double>() == 1.0);
      CHECK(e["log_corrected"].get<bool>());
    }
    if (e["taxonomy"] == "WeaklyStableMin") ++minima;
  }
  CHECK(maxima == 1);
  CHECK(minima == 1);
}

TEST_CASE("outputs are deterministic") {
  // output.dir is part of the hashed config, so both runs use the same directory.
  const fs::path a = fresh("det");
  REQUIRE(run("--profile \"power-max m=3\" --out " + a.string() + " classify") == 0);
  const std::string first = slurp(a / "classify.json");
  REQUIRE(run("--profile \"power-max m=3\" --out " + a.string() + " classify") == 0);
  CHECK(slurp(a / "classify.json") == first);
  REQUIRE(run("--profile nondeg --grid 128 --csv --out " + a.string() + " band-mass --band 1,2") == 0);
  const std::string mass = slurp(a / "band_mass.csv");
  REQUIRE(run("--profile nondeg --grid 128 --csv --out " + a.string() + " band-mass --band 1,2") == 0);
  CHECK(slurp(a / "band_mass.csv") == mass);
  CHECK(mass.rfind("# tool_version=", 0) == 0);
}

TEST_CASE("malformed config exits 2 without artifacts") {
  const fs::path out = fresh("bad_config");
  const fs::path cfg = kTmp / "bad.ini";
  std::ofstream(cfg) << "[grid]\nn = 1000\n[output]\ndir = " << out.string() << "\n";
  CHECK(run("--config " + cfg.string() + " classify") == 2);
  CHECK(fs::is_empty(out));
  std::ofstream(cfg) << "[grid]\nwhat = 1\n";
  CHECK(run("--config " + cfg.string() + " --out " + out.string() + " classify") == 2);
  CHECK(fs::is_empty(out));
  CHECK(run("--config /nonexistent.ini classify") == 2);
  CHECK(run("--profile \"power-max m=1\" classify") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("--band 1 --out " + out.string() + " band-mass") == 2);
  CHECK(fs::is_empty(out));
}

TEST_CASE("diagnostics exit 3") {
  const fs::path out = fresh("diag");
  const fs::path cfg = kTmp / "narrow.ini";
  std::ofstream(cfg) << "[profile]\nname = nondeg\n[window]\nxi_halfwidth = 0.00001\n";
  CHECK(run("--config " + cfg.string() + " --out " + out.string() + " gap-rate") == 3);

  // 80 critical points exceed the default cap of 64.
  const fs::path csv = kTmp / "wiggly.csv";
  {
    std::ofstream f(csv);
    f << "x,A\n";
    const int n = 1024;
    for (int j = 0; j < n; ++j) {
      const double x = 2 * std::numbers::pi * j / n;
      f.precision(17);
      f << x << "," << 1.0 / std::sqrt(1.0 + 0.1 * std::cos(40 * x)) << "\n";
    }
  }
  const fs::path cfg2 = kTmp / "wiggly.ini";
  std::ofstream(cfg2) << "[profile]\ncsv = " << csv.string() << "\n";
  CHECK(run("--config " + cfg2.string() + " --out " + out.string() + " classify") == 3);
}

TEST_CASE("catalog and spectrum subcommands") {
  const fs::path out = fresh("spectrum");
  REQUIRE(run("--out " + out.string() + " catalog") == 0);
  const auto cat = nlohmann::json::parse(slurp(out / "catalog.json"));
  CHECK(cat["profiles"].size() == revlab::catalog_names().size());
  REQUIRE(run("--profile flat --grid 64 --out " + out.string() + " spectrum --dump 3") == 0);
  CHECK(fs::exists(out / "spectrum.csv"));
  CHECK(fs::exists(out / "modes" / "mode_2.bin"));
  CHECK(fs::file_size(out / "modes" / "mode_0.bin") == 40 + 64 * 8);
}

TEST_CASE("verify-all on the flat profile passes") {
  const fs::path out = fresh("verify_flat");
  CHECK(run("--profile flat --out " + out.string() + " verify-all") == 0);
  const auto doc = nlohmann::json::parse(slurp(out / "verify_all.json"));
  CHECK(doc["pass"].get<bool>());
  CHECK(doc["suite"] == "profile");
}
