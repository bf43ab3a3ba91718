// homodyne: command-line driver.
//
//   homodyne two-bec     --config cfg.json [--out f.csv] [--method exact|closed-form|saddle] [--threads N]
//   homodyne thermometry --config cfg.json [--out f.csv] [--threads N]
//   homodyne lattice     --config cfg.json [--out f.csv] [--threads N]
//   homodyne correlation --config cfg.json [--out f.csv] [--threads N]
//   homodyne validate    [--out f.csv] [--inject-j2-offset x] [--inject-lobe-offset x]
//
// Exit codes: 0 ok, 1 validation failure, 2 config/usage error, 3 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "homodyne/cli/run.hpp"
#include "homodyne/validate.hpp"

namespace {

using namespace homodyne;

constexpr int kValidationFailed = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct ScenarioArgs {
  std::string config;
  std::string out;
  std::string method = "exact";
  unsigned threads = 1;
};

flux::Method parse_method(const std::string& m) {
  if (m == "exact") return flux::Method::exact;
  if (m == "closed-form") return flux::Method::closed_form;
  return flux::Method::saddle;
}

// Write to a temporary next to the target, then rename, so a failed run never
// leaves a truncated file behind.
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    body(f);
    if (!f) throw std::runtime_error("write failed for " + path);
  }
  std::filesystem::rename(tmp, path);
}

int run_scenario(const std::string& kind, const ScenarioArgs& a) {
  const auto cfg = cli::parse_config(a.config);
  if (cfg.kind != kind) {
    throw cli::ConfigError({"kind: config is '" + cfg.kind + "' but the subcommand expects '" + kind + "'"});
  }
  const auto out = cli::run_scenario(cfg, {parse_method(a.method), a.threads});
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  emit(a.out, [&](std::ostream& os) { cli::write_csv(os, out); });
  return 0;
}

int run_validate(const std::string& out_path, double j2_offset, double lobe_offset) {
  specfun::fault::j2_offset = j2_offset;
  bosehubbard::fault::lobe_offset = lobe_offset;
  const auto checks = validate::run_all();
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.pass;
    std::printf("%s  %-58s measured=%.12g expected=%.12g tol=%.3g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.measured, c.expected, c.tolerance);
  }
  if (!out_path.empty()) {
    emit(out_path, [&](std::ostream& os) {
      os << "# homodyne_version: " << cli::kVersion << "\n# kind: validate\n";
      os << "# inject_j2_offset: " << cli::format_number(j2_offset) << '\n';
      os << "# inject_lobe_offset: " << cli::format_number(lobe_offset) << '\n';
      os << "check,measured,expected,tolerance,pass\n";
      for (const auto& c : checks) {
        os << '"' << c.name << "\"," << cli::format_number(c.measured) << ',' << cli::format_number(c.expected) << ','
           << cli::format_number(c.tolerance) << ',' << (c.pass ? 1 : 0) << '\n';
      }
    });
  }
  std::printf("%s: %zu checks\n", ok ? "all checks passed" : "validation FAILED", checks.size());
  return ok ? 0 : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homodyne: homodyne detection of condensates, numerical model"};
  app.set_version_flag("--version", std::string(cli::kVersion));
  app.require_subcommand(1);

  const std::map<std::string, std::string> subs = {{"two-bec", "two_bec"},
                                                   {"thermometry", "thermometry"},
                                                   {"lattice", "lattice"},
                                                   {"correlation", "correlation"}};
  std::map<std::string, ScenarioArgs> args;
  std::map<std::string, CLI::App*> apps;
  for (const auto& [name, kind] : subs) {
    auto& a = args[name];
    auto* sc = app.add_subcommand(name, "run a " + kind + " scenario");
    sc->add_option("--config", a.config, "JSON scenario file")->required()->check(CLI::ExistingFile);
    sc->add_option("--out", a.out, "CSV output path (default stdout)");
    sc->add_option("--method", a.method, "exact, closed-form or saddle")
        ->check(CLI::IsMember({"exact", "closed-form", "saddle"}));
    sc->add_option("--threads", a.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    apps[name] = sc;
  }
  std::string val_out;
  double j2_offset = 0.0, lobe_offset = 0.0;
  auto* val = app.add_subcommand("validate", "run the built-in self-checks");
  val->add_option("--out", val_out, "CSV report path");
  val->add_option("--inject-j2-offset", j2_offset, "add a constant to J2 (fault injection)");
  val->add_option("--inject-lobe-offset", lobe_offset, "shift the perturbative lobe boundary (fault injection)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (val->parsed()) return run_validate(val_out, j2_offset, lobe_offset);
    for (const auto& [name, kind] : subs) {
      if (apps[name]->parsed()) return run_scenario(kind, args[name]);
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedGeometry& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
