// cqsl: QSL-time sweeps over correlated two-qubit channels, and the
// validation suite.
//
//   cqsl sweep --preset fig1b --format csv --out fig1b.csv
//   cqsl inset --channel ad --lambda 0.2 --mu 0,1 --tau 0:5:50
//   cqsl validate --suite linalg,oracle

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cqsl/errors.hpp"
#include "cqsl/sweep.hpp"
#include "cqsl/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw cqsl::ParamOutOfRange(fmt::format("not a number: '{}'", text));
  return x;
}

// "a,b,c" or "start:stop:count".
std::vector<double> parse_axis(const std::string& text, const char* flag) {
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw cqsl::ParamOutOfRange(fmt::format("{}: range must be start:stop:count", flag));
    const double count = parse_number(parts[2]);
    if (count < 1 || count != static_cast<double>(static_cast<long>(count)))
      throw cqsl::ParamOutOfRange(fmt::format("{}: count must be a positive integer", flag));
    return cqsl::linspace(parse_number(parts[0]), parse_number(parts[1]), static_cast<std::size_t>(count));
  }
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number(p));
  if (out.empty()) throw cqsl::ParamOutOfRange(fmt::format("{}: empty list", flag));
  return out;
}

struct SweepFlags {
  std::string preset;
  std::string channel;
  std::optional<double> nu, lambda, gamma0, n, m, omega, r, alpha, fd_step;
  std::optional<std::string> mu, tau, tau_d, deriv;
  std::optional<int> quad_steps;
  std::string format = "csv";
  std::string out;
  unsigned threads = 1;
};

void add_sweep_flags(CLI::App& cmd, SweepFlags& f) {
  cmd.add_option("--preset", f.preset, "Figure preset: fig1a fig1b fig2a fig2b fig3a fig3b");
  cmd.add_option("--channel", f.channel, "dephasing | ad | sgad")->check(CLI::IsMember({"dephasing", "ad", "sgad"}));
  cmd.add_option("--nu", f.nu, "Dephasing environment parameter");
  cmd.add_option("--lambda", f.lambda, "AD spectral width");
  cmd.add_option("--gamma0", f.gamma0, "AD coupling (default 1)");
  cmd.add_option("--n", f.n, "SGAD thermal photon number");
  cmd.add_option("--m", f.m, "SGAD squeezing");
  cmd.add_option("--omega", f.omega, "SGAD dissipation rate (default 1)");
  cmd.add_option("--mu", f.mu, "Correlation strengths, list or start:stop:count");
  cmd.add_option("--tau", f.tau, "Initial times, list or start:stop:count");
  cmd.add_option("--tau-d", f.tau_d, "Driving times, list or start:stop:count");
  cmd.add_option("--r", f.r, "Initial-state mixing weight");
  cmd.add_option("--alpha", f.alpha, "Initial-state amplitude");
  cmd.add_option("--quad-steps", f.quad_steps, "Simpson steps (even)");
  cmd.add_option("--deriv", f.deriv, "analytic | fd")->check(CLI::IsMember({"analytic", "fd"}));
  cmd.add_option("--fd-step", f.fd_step, "Finite-difference step");
  cmd.add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--out", f.out, "Output path (stdout if omitted)");
  cmd.add_option("--threads", f.threads, "Worker threads");
}

cqsl::SweepConfig build_config(const SweepFlags& f, cqsl::SweepMode mode) {
  cqsl::SweepConfig c;
  if (!f.preset.empty()) {
    c = cqsl::preset_config(f.preset, mode);
    if (!f.channel.empty() && f.channel != cqsl::to_string(cqsl::family_of(c.params)))
      throw cqsl::ParamOutOfRange(fmt::format("--channel {} conflicts with preset {}", f.channel, f.preset));
  } else {
    if (f.channel.empty()) throw cqsl::ParamOutOfRange("either --preset or --channel is required");
    c.mode = mode;
    if (mode == cqsl::SweepMode::DrivingTime) {
      c.tau = {1.0};
      c.tau_d = cqsl::linspace(0.01, 5.0, 100);
    } else {
      c.tau = cqsl::linspace(0.0, 5.0, 100);
      c.tau_d = {1.0};
    }
    if (f.channel == "dephasing") c.params = cqsl::DephasingParams{};
    if (f.channel == "ad") c.params = cqsl::ADParams{};
    if (f.channel == "sgad") c.params = cqsl::SGADParams{};
  }

  auto reject = [](const char* flag, const char* family) {
    throw cqsl::ParamOutOfRange(fmt::format("{} does not apply to the {} channel", flag, family));
  };
  if (auto* p = std::get_if<cqsl::DephasingParams>(&c.params)) {
    if (f.nu) p->nu = *f.nu;
    if (f.lambda || f.gamma0) reject("--lambda/--gamma0", "dephasing");
    if (f.n || f.m || f.omega) reject("--n/--m/--omega", "dephasing");
  } else if (auto* p = std::get_if<cqsl::ADParams>(&c.params)) {
    if (f.lambda) p->lambda = *f.lambda;
    if (f.gamma0) p->gamma0 = *f.gamma0;
    if (f.nu) reject("--nu", "ad");
    if (f.n || f.m || f.omega) reject("--n/--m/--omega", "ad");
  } else if (auto* p = std::get_if<cqsl::SGADParams>(&c.params)) {
    if (f.n) p->n = *f.n;
    if (f.m) p->m = *f.m;
    if (f.omega) p->omega = *f.omega;
    if (f.nu) reject("--nu", "sgad");
    if (f.lambda || f.gamma0) reject("--lambda/--gamma0", "sgad");
  }

  if (f.mu) c.mu = parse_axis(*f.mu, "--mu");
  if (f.tau) c.tau = parse_axis(*f.tau, "--tau");
  if (f.tau_d) c.tau_d = parse_axis(*f.tau_d, "--tau-d");
  if (f.r) c.initial.r = *f.r;
  if (f.alpha) c.initial.alpha = *f.alpha;
  if (f.quad_steps) c.quad_steps = *f.quad_steps;
  if (f.deriv) c.deriv.mode = *f.deriv == "fd" ? cqsl::DerivMode::FiniteDifference : cqsl::DerivMode::Analytic;
  if (f.fd_step) c.deriv.fd_step = *f.fd_step;
  c.threads = f.threads;
  c.validate();
  return c;
}

int run_sweep_command(const SweepFlags& f, cqsl::SweepMode mode) {
  const auto config = build_config(f, mode);
  const auto format = f.format == "json" ? cqsl::OutputFormat::Json : cqsl::OutputFormat::Csv;
  const auto rows = cqsl::run_sweep(config);
  if (f.out.empty()) {
    cqsl::write_rows(std::cout, format, config, rows);
  } else {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw cqsl::ParamOutOfRange(fmt::format("cannot open '{}' for writing", f.out));
    cqsl::write_rows(file, format, config, rows);
  }
  std::size_t failed = 0;
  for (const auto& row : rows) failed += row.error.empty() ? 0 : 1;
  if (failed > 0) std::cerr << fmt::format("cqsl: {} of {} grid points failed (see error column)\n", failed, rows.size());
  return kExitOk;
}

int run_validate_command(const std::vector<std::string>& suites, const std::string& out) {
  const auto report = cqsl::run_validation(suites);
  if (out.empty()) {
    report.write_json(std::cout);
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw cqsl::ParamOutOfRange(fmt::format("cannot open '{}' for writing", out));
    report.write_json(file);
  }
  for (const auto& c : report.checks) {
    std::cerr << fmt::format("{} {}/{}: measured {:.3e}, limit {:.1e}{}\n", c.passed ? "PASS" : "FAIL", c.suite,
                             c.name, c.measured, c.tolerance, c.passed ? "" : "  (" + c.detail + ")");
  }
  return report.passed() ? kExitOk : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"QSL times of two-qubit states under correlated quantum channels"};
  app.require_subcommand(1);

  SweepFlags sweep_flags, inset_flags;
  auto* sweep = app.add_subcommand("sweep", "QSL time against driving time tau_d (tau fixed)");
  add_sweep_flags(*sweep, sweep_flags);
  auto* inset = app.add_subcommand("inset", "QSL time against initial time tau (tau_d fixed)");
  add_sweep_flags(*inset, inset_flags);

  std::vector<std::string> suites;
  std::string validate_out;
  auto* validate = app.add_subcommand("validate", "Run the invariant and oracle suites");
  validate->add_option("--suite", suites, "Suites to run (default all): linalg states channels qsl oracle figures")
      ->delimiter(',');
  validate->add_option("--out", validate_out, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sweep->parsed()) return run_sweep_command(sweep_flags, cqsl::SweepMode::DrivingTime);
    if (inset->parsed()) return run_sweep_command(inset_flags, cqsl::SweepMode::InitialTime);
    if (validate->parsed()) return run_validate_command(suites, validate_out);
  } catch (const cqsl::ParamOutOfRange& e) {
    std::cerr << "cqsl: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cqsl::Error& e) {
    std::cerr << "cqsl: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
