// qdnls command line: thin dispatch over the C API.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdnls/qdnls.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultOut = "qdnls-out";

// Exit codes: 0 ok, 1 bad input / io / failed verification, 2 numerical or domain failure.
int exit_code(qdnls_status s) {
  switch (s) {
    case QDNLS_OK: return 0;
    case QDNLS_E_DOMAIN:
    case QDNLS_E_NUMERICAL: return 2;
    default: return 1;
  }
}

struct CliFailure {
  int code;
  std::string message;
};

void check(qdnls_status s) {
  if (s != QDNLS_OK) throw CliFailure{exit_code(s), qdnls_last_error()};
}

// Owns a string returned by the library.
json take_json(char* raw) {
  std::unique_ptr<char, void (*)(char*)> p(raw, qdnls_string_free);
  return json::parse(p.get());
}

using ConfigPtr = std::unique_ptr<qdnls_config, void (*)(qdnls_config*)>;

ConfigPtr make_config(const json& j) {
  qdnls_config* c = nullptr;
  check(qdnls_config_create(j.dump().c_str(), &c));
  return ConfigPtr(c, qdnls_config_destroy);
}

json resolved(const qdnls_config* c) {
  char* out = nullptr;
  check(qdnls_config_to_json(c, &out));
  return take_json(out);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw CliFailure{1, "cannot write " + p.string()};
  f << text;
  if (!f) throw CliFailure{1, "write failed: " + p.string()};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliFailure{1, "cannot create " + dir.string() + ": " + ec.message()};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Collects flag values; only flags actually given override the config file.
class Overrides {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key,
                   const std::string& help) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *holder, help);
    apply_.push_back([=](json& j) {
      if (opt->count() > 0) j[key] = *holder;
    });
    return opt;
  }
  CLI::Option* add_flag(CLI::App* app, const std::string& flag, const std::string& key,
                        const std::string& help) {
    auto holder = std::make_shared<bool>(false);
    CLI::Option* opt = app->add_flag(flag, *holder, help);
    apply_.push_back([=](json& j) {
      if (opt->count() > 0) j[key] = *holder;
    });
    return opt;
  }
  void apply(json& j) const {
    for (const auto& f : apply_) f(j);
  }

 private:
  std::vector<std::function<void(json&)>> apply_;
};

struct Globals {
  std::string config_path;
  std::string out;
  std::optional<long> seed;  // reserved: every computation is deterministic
};

// Config file contents. A manifest is accepted too: its resolved config is used.
json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CliFailure{1, "cannot open config " + path};
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CliFailure{1, "malformed config " + path + ": " + e.what()};
  }
  if (j.is_object() && j.contains("resolved_config")) j = j["resolved_config"];
  if (!j.is_object()) throw CliFailure{1, "config must be a JSON object"};
  return j;
}

// Keeps `keys` from a config file; keys valid for other subcommands are ignored,
// anything else is an error.
json pick(const json& file, const std::vector<std::string>& keys) {
  static const std::vector<std::string> known = {
      "M", "N", "mu", "K0", "phases", "delta", "grid", "cutoff", "padding", "dt", "steps",
      "sample_stride", "variant", "tol", "horizon", "exploratory", "out_dir", "phi1", "stride",
      "find_period", "lambda", "M0", "P0", "flavor", "frame", "checkpoint", "lambda_prime"};
  json out = json::object();
  for (const auto& [k, v] : file.items()) {
    if (std::find(keys.begin(), keys.end(), k) != keys.end()) out[k] = v;
    else if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw CliFailure{1, "unknown config key '" + k + "'"};
    }
  }
  return out;
}

void write_manifest(const fs::path& dir, const std::string& sub, const json& config,
                    const Globals& g, double seconds, const std::vector<std::string>& outputs) {
  json m = {{"tool", "qdnls"},
            {"version", qdnls_version()},
            {"subcommand", sub},
            {"resolved_config", config},
            {"seed", g.seed ? json(*g.seed) : json(nullptr)},
            {"started_utc", utc_now()},
            {"wall_clock_seconds", seconds},
            {"outputs", outputs}};
  write_text(dir / ("manifest_" + sub + ".json"), m.dump(2) + "\n");
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const std::vector<std::string> kRunConfigKeys = {
    "M", "N", "mu", "K0", "phases", "delta", "grid", "cutoff", "padding", "dt", "steps",
    "sample_stride", "variant", "tol", "horizon", "exploratory", "out_dir"};

void add_run_config_flags(CLI::App* app, Overrides& o) {
  o.add<long>(app, "--m", "M", "quad parameter M");
  o.add<long>(app, "--n", "N", "quad parameter N");
  o.add<double>(app, "--mu", "mu", "quintic coupling");
  o.add<double>(app, "--k0", "K0", "initial K in (0,1)");
  o.add<std::vector<double>>(app, "--phases", "phases", "four initial phases")->expected(4);
  o.add<double>(app, "--delta", "delta", "residual weight exponent in [1/2,1)");
  o.add<int>(app, "--grid", "grid", "base grid size (power of two)");
  o.add<int>(app, "--cutoff", "cutoff", "spectral cutoff (0: grid/3)");
  o.add<int>(app, "--padding", "padding", "dealiasing padding factor");
  o.add<double>(app, "--dt", "dt", "PDE time step (0: automatic)");
  o.add<long>(app, "--steps", "steps", "PDE steps (0: cover the window)");
  o.add<long>(app, "--sample-stride", "sample_stride", "PDE steps between samples");
  o.add<std::string>(app, "--variant", "variant", "reduced variant: consistent|verbatim");
  o.add<double>(app, "--tol", "tol", "ODE tolerance");
  o.add<double>(app, "--horizon", "horizon", "ODE horizon (0: one period)");
  o.add_flag(app, "--exploratory", "exploratory", "also run the PDE over a full period");
}

int run_resonance(const Globals& g, long m, long n) {
  Timer timer;
  char* out = nullptr;
  check(qdnls_resonance_report(m, n, &out));
  const json report = take_json(out);
  std::cout << report.dump(2) << "\n";
  if (!g.out.empty()) {
    const fs::path dir(g.out);
    ensure_dir(dir);
    write_text(dir / "resonance.json", report.dump(2) + "\n");
    write_manifest(dir, "resonance", {{"M", m}, {"N", n}}, g, timer.seconds(), {"resonance.json"});
  }
  return 0;
}

int run_reduced(const Globals& g, const Overrides& o) {
  Timer timer;
  json req = pick(load_config(g.config_path),
                  {"mu", "K0", "phi1", "variant", "tol", "horizon", "stride", "find_period"});
  o.apply(req);
  const fs::path dir(g.out.empty() ? kDefaultOut : g.out);
  ensure_dir(dir);
  char* out = nullptr;
  check(qdnls_reduced_run(req.dump().c_str(), (dir / "reduced.csv").string().c_str(), &out));
  const json report = take_json(out);
  std::cout << report.dump(2) << "\n";
  write_text(dir / "reduced.json", report.dump(2) + "\n");
  write_manifest(dir, "reduced", req, g, timer.seconds(), {"reduced.csv", "reduced.json"});
  return 0;
}

int run_toy(const Globals& g, const Overrides& o) {
  Timer timer;
  json req = pick(load_config(g.config_path), {"M", "N", "mu", "lambda", "K0", "phases", "M0",
                                               "P0", "flavor", "frame", "tol", "horizon", "stride"});
  o.apply(req);
  const fs::path dir(g.out.empty() ? kDefaultOut : g.out);
  ensure_dir(dir);
  char* out = nullptr;
  check(qdnls_toy_run(req.dump().c_str(), (dir / "toy.csv").string().c_str(), &out));
  const json report = take_json(out);
  std::cout << report.dump(2) << "\n";
  write_text(dir / "toy.json", report.dump(2) + "\n");
  write_manifest(dir, "toy", req, g, timer.seconds(), {"toy.csv", "toy.json"});
  return 0;
}

int run_pde(const Globals& g, const Overrides& o, bool checkpoint, const std::string& inspect) {
  Timer timer;
  if (!inspect.empty()) {
    qdnls_field* f = nullptr;
    check(qdnls_field_load(inspect.c_str(), &f));
    std::unique_ptr<qdnls_field, void (*)(qdnls_field*)> owned(f, qdnls_field_destroy);
    char* out = nullptr;
    check(qdnls_field_info(f, &out));
    std::cout << take_json(out).dump(2) << "\n";
    return 0;
  }
  json req = pick(load_config(g.config_path), kRunConfigKeys);
  o.apply(req);
  req.erase("out_dir");
  const auto cfg = make_config(req);
  const json config = resolved(cfg.get());
  const fs::path dir(g.out.empty() ? kDefaultOut : g.out);
  ensure_dir(dir);
  std::vector<std::string> outputs = {"pde.csv", "pde.csv.json", "pde.json"};
  std::string ckpt;
  if (checkpoint) {
    ckpt = (dir / "pde_final.bin").string();
    outputs.push_back("pde_final.bin");
    outputs.push_back("pde_final.bin.json");
  }
  char* out = nullptr;
  check(qdnls_pde_run(cfg.get(), 0.0, (dir / "pde.csv").string().c_str(),
                      checkpoint ? ckpt.c_str() : nullptr, &out));
  const json report = take_json(out);
  std::cout << report.dump(2) << "\n";
  write_text(dir / "pde.json", report.dump(2) + "\n");
  write_manifest(dir, "pde", config, g, timer.seconds(), outputs);
  return 0;
}

int run_compare(const Globals& g, const Overrides& o) {
  Timer timer;
  json req = pick(load_config(g.config_path), kRunConfigKeys);
  o.apply(req);
  const fs::path dir(g.out.empty() ? kDefaultOut : g.out);
  req["out_dir"] = dir.string();
  const auto cfg = make_config(req);
  json config = resolved(cfg.get());
  char* out = nullptr;
  check(qdnls_compare(cfg.get(), &out));
  const json report = take_json(out);
  std::cout << report.dump(2) << "\n";
  write_manifest(dir, "compare", config, g, timer.seconds(), {"report.json"});
  return 0;
}

void print_line(const char* line, int, void*) {
  std::cout << line << std::endl;
}

int run_verify(const Globals& g, const std::vector<int>& ids) {
  Timer timer;
  int all = 0;
  char* out = nullptr;
  check(qdnls_verify(ids.data(), ids.size(), print_line, nullptr, &all, &out));
  const json results = take_json(out);
  std::cout << (all ? "all criteria passed" : "some criteria FAILED") << std::endl;
  if (!g.out.empty()) {
    const fs::path dir(g.out);
    ensure_dir(dir);
    write_text(dir / "verify.json", results.dump(2) + "\n");
    // Series for figures: the default exchange experiment.
    const auto cfg = make_config({{"out_dir", dir.string()}});
    char* rep = nullptr;
    check(qdnls_compare(cfg.get(), &rep));
    take_json(rep);
    write_manifest(dir, "verify", {{"criteria", ids}, {"compare", resolved(cfg.get())}}, g,
                   timer.seconds(), {"verify.json", "report.json"});
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdnls: quintic derivative NLS laboratory"};
  app.set_version_flag("--version", std::string(qdnls_version()));
  app.require_subcommand(1);

  Globals g;
  long seed = 0;
  app.add_option("--config", g.config_path, "JSON config file (RunConfig fields or a manifest)");
  app.add_option("--out", g.out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "reserved; results do not depend on it");

  auto* res = app.add_subcommand("resonance", "cluster report for Lambda(M,N)");
  long m = 101, n = -100;
  res->add_option("--m", m, "M")->capture_default_str();
  res->add_option("--n", n, "N")->capture_default_str();

  Overrides red_o;
  auto* red = app.add_subcommand("reduced", "reduced (phi1, K) flow");
  red_o.add<double>(red, "--mu", "mu", "coupling (default 1)");
  red_o.add<double>(red, "--k0", "K0", "initial K (default 0.2)");
  red_o.add<double>(red, "--phi1", "phi1", "initial angle (default 0)");
  red_o.add<std::string>(red, "--variant", "variant", "consistent|verbatim");
  red_o.add<double>(red, "--tol", "tol", "tolerance (default 1e-12)");
  red_o.add<double>(red, "--horizon", "horizon", "0: one period");
  red_o.add<double>(red, "--stride", "stride", "sample spacing (0: every step)");
  red_o.add_flag(red, "--find-period{true},--no-period{false}", "find_period", "period report");

  Overrides toy_o;
  auto* toy = app.add_subcommand("toy", "four-mode toy model");
  toy_o.add<long>(toy, "--m", "M", "M (default 101)");
  toy_o.add<long>(toy, "--n", "N", "N (default -100)");
  toy_o.add<double>(toy, "--mu", "mu", "coupling (default 1)");
  toy_o.add<double>(toy, "--lambda", "lambda", "cubic coupling (default 20(M+N))");
  toy_o.add<double>(toy, "--k0", "K0", "initial K (default 0.2)");
  toy_o.add<std::vector<double>>(toy, "--phases", "phases", "four initial phases")->expected(4);
  toy_o.add<double>(toy, "--m0", "M0", "mass constant (default 1.5)");
  toy_o.add<double>(toy, "--p0", "P0", "momentum constant (default 0)");
  toy_o.add<std::string>(toy, "--flavor", "flavor", "gauged|full");
  toy_o.add<std::string>(toy, "--frame", "frame", "corotating|cartesian (full flavor)");
  toy_o.add<double>(toy, "--tol", "tol", "tolerance (default 1e-12)");
  toy_o.add<double>(toy, "--horizon", "horizon", "0: one reduced period");
  toy_o.add<double>(toy, "--stride", "stride", "sample spacing (0: every step)");

  Overrides pde_o;
  auto* pde = app.add_subcommand("pde", "spectral PDE over the guaranteed window");
  add_run_config_flags(pde, pde_o);
  bool checkpoint = false;
  std::string inspect;
  pde->add_flag("--checkpoint", checkpoint, "save the final field");
  pde->add_option("--inspect", inspect, "print a checkpoint's summary and exit");

  Overrides cmp_o;
  auto* cmp = app.add_subcommand("compare", "reduced vs toy vs PDE exchange experiment");
  add_run_config_flags(cmp, cmp_o);

  auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
  std::vector<int> ids;
  ver->add_option("--criteria", ids, "subset of criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*res) return run_resonance(g, m, n);
    if (*red) return run_reduced(g, red_o);
    if (*toy) return run_toy(g, toy_o);
    if (*pde) return run_pde(g, pde_o, checkpoint, inspect);
    if (*cmp) return run_compare(g, cmp_o);
    if (*ver) return run_verify(g, ids);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
