#include "cqsl/qsl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cqsl/errors.hpp"

namespace cqsl {

namespace {

ComplexMatrix traceless_hermitian(const ComplexMatrix& m) {
  ComplexMatrix h = hermitian_part(m);
  const cplx shift = h.trace() / static_cast<double>(h.rows());
  for (std::size_t i = 0; i < h.rows(); ++i) h(i, i) -= shift;
  return h;
}

ComplexMatrix evolve_raw(const ChannelSpec& spec, const ComplexMatrix& rho0, double t) {
  return hermitian_part(combined_map(spec, t).apply(rho0));
}

ComplexMatrix derivative_raw(const ChannelSpec& spec, const ComplexMatrix& rho0, double t,
                             const DerivOptions& deriv) {
  if (deriv.mode == DerivMode::Analytic) return traceless_hermitian(apply_superop(combined_map_rate(spec, t), rho0));
  const double h = deriv.fd_step;
  ComplexMatrix d;
  if (t >= h) {
    d = evolve_raw(spec, rho0, t + h) - evolve_raw(spec, rho0, t - h);
  } else {
    d = cplx{-3.0} * evolve_raw(spec, rho0, t) + cplx{4.0} * evolve_raw(spec, rho0, t + h) -
        evolve_raw(spec, rho0, t + 2.0 * h);
  }
  d *= 1.0 / (2.0 * h);
  return traceless_hermitian(d);
}

struct Panel {
  double a = 0.0;
  double b = 0.0;
  int steps = 0;
  std::vector<std::vector<double>> values;  // values[node][component]
};

// Simpson sum over a panel using every `stride`-th node.
double simpson(const Panel& panel, std::size_t comp, int stride) {
  const int n = panel.steps / stride;
  const double h = (panel.b - panel.a) / n;
  double sum = panel.values.front()[comp] + panel.values.back()[comp];
  for (int k = 1; k < n; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * panel.values[static_cast<std::size_t>(k * stride)][comp];
  return sum * h / 3.0;
}

void check_values(const std::vector<double>& v, std::size_t components, double t) {
  if (v.size() != components) throw DimensionMismatch("integrand returned the wrong number of components");
  for (double x : v)
    if (!std::isfinite(x)) throw QuadratureNonConvergent(fmt::format("integrand is not finite at t = {}", t));
}

// Zeros of g on (t0, t1) from sign changes on a uniform scan, refined by bisection.
std::vector<double> sign_changes(const std::function<double(double)>& g, double t0, double t1) {
  constexpr int kScan = 256;
  std::vector<double> roots;
  double left = t0;
  double g_left = g(left);
  for (int k = 1; k <= kScan; ++k) {
    const double right = t0 + (t1 - t0) * k / kScan;
    const double g_right = g(right);
    if (g_left * g_right < 0.0) {
      double lo = left, hi = right, g_lo = g_left;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = g(mid);
        if (g_lo * g_mid <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          g_lo = g_mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    left = right;
    g_left = g_right;
  }
  return roots;
}

double ml_from_singular_values(std::span<const double> sv, std::span<const double> beta) {
  const std::size_t n = std::min(sv.size(), beta.size());
  return std::inner_product(sv.begin(), sv.begin() + static_cast<std::ptrdiff_t>(n), beta.begin(), 0.0);
}

double mt_from_singular_values(std::span<const double> sv) {
  return std::sqrt(std::inner_product(sv.begin(), sv.end(), sv.begin(), 0.0));
}

} // namespace

std::string_view to_string(DerivMode mode) { return mode == DerivMode::Analytic ? "analytic" : "fd"; }
std::string_view to_string(Bound bound) { return bound == Bound::ML ? "ML" : "MT"; }

void QslQuery::validate() const {
  spec.validate();
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ParamOutOfRange(fmt::format("tau must be >= 0, got {}", tau));
  if (!(tau_d > 0.0) || !std::isfinite(tau_d)) throw ParamOutOfRange(fmt::format("tau_d must be > 0, got {}", tau_d));
  if (quad_steps < 2 || quad_steps % 2 != 0)
    throw ParamOutOfRange(fmt::format("quad_steps must be a positive even integer, got {}", quad_steps));
  if (!(deriv.fd_step > 0.0)) throw ParamOutOfRange(fmt::format("fd step must be > 0, got {}", deriv.fd_step));
}

double relative_purity(const DensityMatrix& rho_tau, const DensityMatrix& rho_later) {
  const double p = trace_product(rho_tau.matrix(), rho_tau.matrix()).real();
  if (p < 0.25 - 1e-9) throw DegeneratePurity(fmt::format("tr(rho^2) = {} is below 1/4", p));
  return trace_product(rho_tau.matrix(), rho_later.matrix()).real() / p;
}

ComplexMatrix state_at(const ChannelSpec& spec, const InitialStateParams& initial, double t) {
  return evolve_raw(spec, make_initial_state(initial).matrix(), t);
}

ComplexMatrix state_derivative(const ChannelSpec& spec, const InitialStateParams& initial, double t,
                               const DerivOptions& deriv) {
  return derivative_raw(spec, make_initial_state(initial).matrix(), t, deriv);
}

double ml_value(const ComplexMatrix& rho_dot, std::span<const double> beta) {
  const auto sv = singular_values_hermitian(rho_dot);
  std::vector<double> ranked(beta.begin(), beta.end());
  std::sort(ranked.begin(), ranked.end(), std::greater<>());
  return ml_from_singular_values(sv, ranked);
}

double mt_value(const ComplexMatrix& rho_dot) { return rho_dot.frobenius_norm(); }

double ml_integrand(const ChannelSpec& spec, const InitialStateParams& initial, double tau, double t,
                    const DerivOptions& deriv) {
  const auto beta = singular_values_hermitian(state_at(spec, initial, tau));
  return ml_value(state_derivative(spec, initial, t, deriv), beta);
}

double mt_integrand(const ChannelSpec& spec, const InitialStateParams& initial, double t, const DerivOptions& deriv) {
  return mt_value(state_derivative(spec, initial, t, deriv));
}

// ---------------------------------------------------------------------------

std::vector<Average> time_average_multi(const std::function<std::vector<double>(double)>& integrand,
                                        std::size_t components, double tau, double tau_d,
                                        const QuadratureOptions& options) {
  if (!(tau_d > 0.0)) throw ParamOutOfRange(fmt::format("tau_d must be > 0, got {}", tau_d));
  if (options.steps < 2 || options.steps % 2 != 0)
    throw ParamOutOfRange(fmt::format("quadrature steps must be even, got {}", options.steps));

  const double t1 = tau + tau_d;
  std::vector<double> cuts{tau};
  {
    std::vector<double> bp = options.breakpoints;
    std::sort(bp.begin(), bp.end());
    const double eps = 1e-9 * tau_d;
    for (double b : bp)
      if (b > cuts.back() + eps && b < t1 - eps) cuts.push_back(b);
    cuts.push_back(t1);
  }

  // Each panel gets a multiple of 4 steps so the half-resolution sum is
  // itself a valid Simpson sum.
  std::vector<Panel> panels;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Panel p;
    p.a = cuts[k];
    p.b = cuts[k + 1];
    const double share = options.steps * (p.b - p.a) / tau_d;
    p.steps = std::max(4, 4 * static_cast<int>(std::ceil(share / 4.0 - 1e-9)));
    p.values.resize(static_cast<std::size_t>(p.steps) + 1);
    for (int i = 0; i <= p.steps; ++i) {
      const double t = (i == p.steps) ? p.b : p.a + (p.b - p.a) * i / p.steps;
      auto v = integrand(t);
      check_values(v, components, t);
      p.values[static_cast<std::size_t>(i)] = std::move(v);
    }
    panels.push_back(std::move(p));
  }

  while (true) {
    std::vector<double> fine(components, 0.0), coarse(components, 0.0);
    int total = 0;
    for (const auto& p : panels) {
      total += p.steps;
      for (std::size_t c = 0; c < components; ++c) {
        fine[c] += simpson(p, c, 1);
        coarse[c] += simpson(p, c, 2);
      }
    }
    bool converged = true;
    for (std::size_t c = 0; c < components; ++c)
      if (std::abs(fine[c] - coarse[c]) > kQuadRelTol * std::abs(fine[c]) + 1e-15) converged = false;

    if (converged) {
      std::vector<Average> out(components);
      for (std::size_t c = 0; c < components; ++c)
        out[c] = {fine[c] / tau_d, std::abs(fine[c] - coarse[c]) / tau_d, total};
      return out;
    }
    if (total >= kMaxQuadSteps) {
      double worst = 0.0;
      for (std::size_t c = 0; c < components; ++c)
        worst = std::max(worst, std::abs(fine[c] - coarse[c]) / std::max(std::abs(fine[c]), 1e-300));
      throw QuadratureNonConvergent(fmt::format(
          "Simpson halving change {:.3e} (relative) on [{}, {}] after {} steps", worst, tau, t1, total));
    }

    for (auto& p : panels) {
      const int n = p.steps * 2;
      std::vector<std::vector<double>> values(static_cast<std::size_t>(n) + 1);
      for (int i = 0; i <= n; ++i) {
        if (i % 2 == 0) {
          values[static_cast<std::size_t>(i)] = std::move(p.values[static_cast<std::size_t>(i / 2)]);
        } else {
          const double t = p.a + (p.b - p.a) * i / n;
          auto v = integrand(t);
          check_values(v, components, t);
          values[static_cast<std::size_t>(i)] = std::move(v);
        }
      }
      p.steps = n;
      p.values = std::move(values);
    }
  }
}

Average time_average(const std::function<double(double)>& integrand, double tau, double tau_d,
                     const QuadratureOptions& options) {
  auto wrapped = [&](double t) { return std::vector<double>{integrand(t)}; };
  return time_average_multi(wrapped, 1, tau, tau_d, options).front();
}

std::vector<double> kink_times(const ChannelSpec& spec, double t0, double t1) {
  std::vector<double> out;
  auto append = [&](const std::function<double(double)>& g) {
    const auto roots = sign_changes(g, t0, t1);
    out.insert(out.end(), roots.begin(), roots.end());
  };
  if (const auto* p = std::get_if<DephasingParams>(&spec.params)) {
    append([p](double t) { return dephasing_kernel(t, *p).lambda; });
    append([p](double t) { return dephasing_kernel(t, *p).lambda_rate; });
  } else if (const auto* p = std::get_if<ADParams>(&spec.params)) {
    append([p](double t) { return ad_amplitude(t, *p).amplitude; });
    append([p](double t) { return ad_amplitude(t, *p).amplitude_rate; });
  }
  std::sort(out.begin(), out.end());
  return out;
}

QslResult qsl_time(const QslQuery& query) {
  query.validate();
  const ChannelSpec& spec = query.spec;
  const DensityMatrix initial = make_initial_state(query.initial);
  const ComplexMatrix& rho0 = initial.matrix();
  const double t1 = query.tau + query.tau_d;

  const DensityMatrix rho_tau = evolve(initial, spec, query.tau);
  const DensityMatrix rho_later = evolve(initial, spec, t1);

  QslResult res;
  res.purity = purity(rho_tau);
  res.f = relative_purity(rho_tau, rho_later);
  res.numerator = std::abs(trace_product(rho_tau.matrix(), rho_later.matrix() - rho_tau.matrix()).real());

  const auto beta = singular_values_hermitian(rho_tau.matrix());
  const QuadratureOptions quad{query.quad_steps, kink_times(spec, query.tau, t1)};

  auto averages = [&](const std::function<ComplexMatrix(double)>& rate) {
    return time_average_multi(
        [&](double t) {
          const auto sv = singular_values_hermitian(rate(t));
          return std::vector<double>{ml_from_singular_values(sv, beta), mt_from_singular_values(sv)};
        },
        2, query.tau, query.tau_d, quad);
  };

  const auto avg = averages([&](double t) { return derivative_raw(spec, rho0, t, query.deriv); });
  res.ml_avg = avg[0].value;
  res.mt_avg = avg[1].value;
  res.quad_error_estimate = std::max(avg[0].error_estimate, avg[1].error_estimate);
  res.active_bound = res.ml_avg <= res.mt_avg ? Bound::ML : Bound::MT;
  res.frozen = res.numerator < kFrozenTol && res.ml_avg < kFrozenTol;

  if (!res.frozen) {
    res.tau_qsl = std::max(1.0 / res.ml_avg, 1.0 / res.mt_avg) * res.numerator;
    return res;
  }

  if (spec.family() != ChannelFamily::DephasingColored) {
    res.tau_qsl = 0.0;
    return res;
  }

  // Both the numerator and the denominators are proportional to (1 - mu) near
  // the stationary point; divide it out. The state moves along
  // D_t = (uncorrelated - correlated branch) applied to rho0.
  auto direction = [&](double t) {
    return uncorrelated_two_qubit_map(spec.params, t).apply(rho0) - correlated_two_qubit_map(spec.params, t).apply(rho0);
  };
  const double lim_numerator =
      std::abs(trace_product(rho_tau.matrix(), direction(t1) - direction(query.tau)).real());
  const auto lim = averages([&](double t) {
    return traceless_hermitian(
        apply_superop(uncorrelated_two_qubit_map_rate(spec.params, t) - correlated_two_qubit_map_rate(spec.params, t),
                      rho0));
  });
  res.quad_error_estimate = std::max(lim[0].error_estimate, lim[1].error_estimate);
  if (lim[0].value > 0.0 && lim[1].value > 0.0) {
    res.tau_qsl = std::max(1.0 / lim[0].value, 1.0 / lim[1].value) * lim_numerator;
    res.active_bound = lim[0].value <= lim[1].value ? Bound::ML : Bound::MT;
  }
  return res;
}

double qsl_dephasing_closed_form(const DephasingParams& params, const InitialStateParams& initial, double mu,
                                 double tau, double tau_d, int quad_steps) {
  ChannelSpec{params, mu}.validate();
  const double a2 = initial.alpha * initial.alpha;
  const double c = initial.alpha * std::sqrt(1.0 - a2) * initial.r;
  if (c == 0.0) return 0.0;

  const double l0 = dephasing_kernel(tau, params).lambda;
  const double l1 = dephasing_kernel(tau + tau_d, params).lambda;
  const double numerator = 2.0 * c * c * (mu + (1.0 - mu) * l0 * l0) * std::abs(l1 * l1 - l0 * l0);

  const auto integrand = [&](double t) {
    const auto k = dephasing_kernel(t, params);
    return -k.lambda * k.lambda_rate;
  };
  const double avg = time_average(integrand, tau, tau_d, {quad_steps, {}}).value;
  return numerator / (2.0 * std::sqrt(2.0) * c * avg);
}

} // namespace cqsl
