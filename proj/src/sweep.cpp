#include "cqsl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "cqsl/errors.hpp"

namespace cqsl {

namespace {

std::string num(double x) { return fmt::format("{:.16g}", x); }

std::string join(const std::vector<double>& xs) {
  std::vector<std::string> parts;
  parts.reserve(xs.size());
  for (double x : xs) parts.push_back(num(x));
  return fmt::format("{}", fmt::join(parts, ","));
}

void require_list(const std::vector<double>& xs, const char* name) {
  if (xs.empty()) throw ParamOutOfRange(fmt::format("{} list is empty", name));
}

} // namespace

std::string_view to_string(SweepMode mode) { return mode == SweepMode::DrivingTime ? "sweep" : "inset"; }

void SweepConfig::validate() const {
  validate_params(params);
  require_list(mu, "mu");
  require_list(tau, "tau");
  require_list(tau_d, "tau_d");
  if (initial.r < 0.0 || initial.r > 1.0) throw ParamOutOfRange(fmt::format("r must lie in [0,1], got {}", initial.r));
  if (initial.alpha < 0.0 || initial.alpha > 1.0)
    throw ParamOutOfRange(fmt::format("alpha must lie in [0,1], got {}", initial.alpha));
  // Building one query per axis value checks every range once.
  QslQuery probe{ChannelSpec{params, mu.front()}, initial, tau.front(), tau_d.front(), quad_steps, deriv};
  for (double m : mu) {
    probe.spec.mu = m;
    probe.validate();
  }
  for (double t : tau) {
    probe.tau = t;
    probe.validate();
  }
  for (double t : tau_d) {
    probe.tau_d = t;
    probe.validate();
  }
  if (threads == 0) throw ParamOutOfRange("threads must be >= 1");
}

std::vector<double> linspace(double start, double stop, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {start};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = stop;
  return out;
}

std::vector<std::string> preset_names() { return {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b"}; }

SweepConfig preset_config(std::string_view name, SweepMode mode) {
  SweepConfig c;
  if (name == "fig1a") {
    c.params = DephasingParams{0.1};
  } else if (name == "fig1b") {
    c.params = DephasingParams{1.0};
  } else if (name == "fig2a") {
    c.params = ADParams{2.0, 1.0};
  } else if (name == "fig2b") {
    c.params = ADParams{0.2, 1.0};
  } else if (name == "fig3a") {
    c.params = SGADParams{1.0, 0.0, 1.0};
  } else if (name == "fig3b") {
    c.params = SGADParams{1.0, 1.0, 1.0};
  } else {
    throw ParamOutOfRange(fmt::format("unknown preset '{}'", name));
  }
  c.preset = std::string(name);
  c.mode = mode;
  c.initial = InitialStateParams{};
  if (mode == SweepMode::DrivingTime) {
    c.tau = {1.0};
    c.tau_d = linspace(0.01, 5.0, 100);
  } else {
    c.tau = linspace(0.0, 5.0, 100);
    c.tau_d = {1.0};
  }
  return c;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const auto family = family_of(config.params);

  std::vector<SweepRow> rows;
  rows.reserve(config.mu.size() * config.tau.size() * config.tau_d.size());
  for (double mu : config.mu)
    for (double tau : config.tau)
      for (double tau_d : config.tau_d) rows.push_back(SweepRow{family, mu, tau, tau_d, {}, {}});

  auto work = [&](SweepRow& row) {
    const QslQuery q{ChannelSpec{config.params, row.mu}, config.initial, row.tau, row.tau_d, config.quad_steps,
                     config.deriv};
    try {
      row.result = qsl_time(q);
    } catch (const Error& e) {
      row.error = e.what();
    }
  };

  const unsigned workers = std::min<unsigned>(config.threads, static_cast<unsigned>(rows.size()));
  if (workers <= 1) {
    for (auto& row : rows) work(row);
    return rows;
  }
  // Each row is written only by the worker that claimed its index.
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) work(rows[i]);
      });
    }
  }
  return rows;
}

std::string describe_params(const FamilyParams& params) {
  struct Visitor {
    std::string operator()(const DephasingParams& p) const { return fmt::format("nu={}", num(p.nu)); }
    std::string operator()(const ADParams& p) const {
      return fmt::format("lambda={} gamma0={}", num(p.lambda), num(p.gamma0));
    }
    std::string operator()(const SGADParams& p) const {
      return fmt::format("n={} m={} omega={}", num(p.n), num(p.m), num(p.omega));
    }
  };
  return std::visit(Visitor{}, params);
}

void write_csv(std::ostream& out, const SweepConfig& config, const std::vector<SweepRow>& rows) {
  out << "# cqsl " << kToolVersion << '\n';
  out << "# mode: " << to_string(config.mode) << '\n';
  out << "# preset: " << (config.preset.empty() ? "custom" : config.preset) << '\n';
  out << "# channel: " << to_string(family_of(config.params)) << ' ' << describe_params(config.params) << '\n';
  out << "# time units: gamma0 = 1 (ad), omega = 1 (sgad) unless set above\n";
  out << "# initial: r=" << num(config.initial.r) << " alpha=" << num(config.initial.alpha) << '\n';
  out << fmt::format("# quadrature: composite simpson steps={} rel_tol={} max_steps={}\n", config.quad_steps,
                     kQuadRelTol, kMaxQuadSteps);
  out << "# derivative: " << to_string(config.deriv.mode);
  if (config.deriv.mode == DerivMode::FiniteDifference) out << " h=" << num(config.deriv.fd_step);
  out << '\n';
  out << "# mu: " << join(config.mu) << '\n';
  out << "# tau: " << join(config.tau) << '\n';
  out << "# tau_d: " << join(config.tau_d) << '\n';
  out << "family,mu,tau,tau_d,f,ml_avg,mt_avg,tau_qsl,active_bound,frozen,quad_error,error\n";
  for (const auto& row : rows) {
    out << to_string(row.family) << ',' << num(row.mu) << ',' << num(row.tau) << ',' << num(row.tau_d) << ',';
    if (row.error.empty()) {
      const auto& r = row.result;
      out << num(r.f) << ',' << num(r.ml_avg) << ',' << num(r.mt_avg) << ',' << num(r.tau_qsl) << ','
          << to_string(r.active_bound) << ',' << (r.frozen ? "true" : "false") << ',' << num(r.quad_error_estimate)
          << ",\n";
    } else {
      std::string msg = row.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      out << ",,,,,,,\"" << msg << "\"\n";
    }
  }
}

void write_json(std::ostream& out, const SweepConfig&, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json rec;
    rec["family"] = std::string(to_string(row.family));
    rec["mu"] = row.mu;
    rec["tau"] = row.tau;
    rec["tau_d"] = row.tau_d;
    if (row.error.empty()) {
      const auto& r = row.result;
      rec["f"] = r.f;
      rec["ml_avg"] = r.ml_avg;
      rec["mt_avg"] = r.mt_avg;
      rec["tau_qsl"] = r.tau_qsl;
      rec["active_bound"] = std::string(to_string(r.active_bound));
      rec["frozen"] = r.frozen;
      rec["quad_error"] = r.quad_error_estimate;
      rec["error"] = nullptr;
    } else {
      for (const char* key : {"f", "ml_avg", "mt_avg", "tau_qsl", "active_bound", "frozen", "quad_error"})
        rec[key] = nullptr;
      rec["error"] = row.error;
    }
    arr.push_back(std::move(rec));
  }
  out << arr.dump(2) << '\n';
}

void write_rows(std::ostream& out, OutputFormat format, const SweepConfig& config, const std::vector<SweepRow>& rows) {
  if (format == OutputFormat::Csv) {
    write_csv(out, config, rows);
  } else {
    write_json(out, config, rows);
  }
}

} // namespace cqsl
