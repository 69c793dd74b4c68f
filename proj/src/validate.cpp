#include "cqsl/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "cqsl/closed_form.hpp"
#include "cqsl/errors.hpp"
#include "cqsl/oracle.hpp"
#include "cqsl/qsl.hpp"
#include "cqsl/sweep.hpp"

namespace cqsl {

namespace {

constexpr std::uint64_t kSeed = 20240611;

// Tracks the worst value of a "smaller is better" quantity.
struct Worst {
  double value = 0.0;
  std::string where;

  void update(double v, const std::string& at) {
    if (!(v <= value)) {  // also catches NaN
      value = v;
      where = at;
    }
  }
};

CheckResult below(std::string suite, std::string name, const Worst& w, double tol) {
  CheckResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.measured = w.value;
  r.tolerance = tol;
  r.passed = w.value <= tol;
  r.detail = w.where.empty() ? "" : "worst at " + w.where;
  return r;
}

// Runs fn and turns a library exception into a failed check.
template <class Fn>
CheckResult guarded(const std::string& suite, const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    CheckResult r;
    r.suite = suite;
    r.name = name;
    r.passed = false;
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.detail = std::string("exception: ") + e.what();
    return r;
  }
}

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(n, n);
  for (auto& x : m.entries()) x = {u(rng), u(rng)};
  return m;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) { return hermitian_part(random_matrix(rng, n)); }

// Random density matrix A A^dagger / tr.
ComplexMatrix random_state(std::mt19937_64& rng, std::size_t n) {
  const auto a = random_matrix(rng, n);
  ComplexMatrix rho = a * a.adjoint();
  rho *= 1.0 / rho.trace().real();
  return hermitian_part(rho);
}

std::vector<FamilyParams> grid_families() {
  return {DephasingParams{0.1}, DephasingParams{1.0}, ADParams{2.0, 1.0}, ADParams{0.2, 1.0},
          SGADParams{1.0, 0.0, 1.0}, SGADParams{1.0, 1.0, 1.0}};
}

std::string label(const FamilyParams& p) { return fmt::format("{} {}", to_string(family_of(p)), describe_params(p)); }

const std::vector<double> kGridMu{0.0, 0.25, 0.5, 0.75, 1.0};

// ---------------------------------------------------------------------------

std::vector<CheckResult> linalg_suite() {
  const std::string s = "linalg";
  std::vector<CheckResult> out;
  std::mt19937_64 rng(kSeed);

  out.push_back(guarded(s, "kron_sigma_plus", [&] {
    Worst w;
    w.update(max_abs_diff(kron(pauli::plus(), pauli::plus()), ComplexMatrix::unit(4, 0, 3)), "");
    w.update(max_abs_diff(kron(pauli::z(), pauli::z()),
                          ComplexMatrix::diagonal(std::vector<double>{1.0, -1.0, -1.0, 1.0})),
             "z kron z");
    return below(s, "kron_sigma_plus", w, 0.0);
  }));

  out.push_back(guarded(s, "kron_mixed_product", [&] {
    Worst w;
    for (int k = 0; k < 200; ++k) {
      const auto a = random_matrix(rng, 2), b = random_matrix(rng, 2), c = random_matrix(rng, 2),
                 d = random_matrix(rng, 2);
      w.update(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)), fmt::format("sample {}", k));
    }
    return below(s, "kron_mixed_product", w, 1e-12);
  }));

  out.push_back(guarded(s, "eig_reconstruction", [&] {
    Worst w;
    for (int k = 0; k < 1000; ++k) {
      const auto m = random_hermitian(rng, 4);
      const auto e = hermitian_eig(m);
      const auto rec = e.eigenvectors * ComplexMatrix::diagonal(std::span<const double>(e.eigenvalues)) *
                       e.eigenvectors.adjoint();
      w.update((m - rec).frobenius_norm(), fmt::format("sample {}", k));
      if (!std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end(), std::greater<>()))
        w.update(1.0, fmt::format("sample {} unsorted", k));
    }
    return below(s, "eig_reconstruction", w, 1e-10);
  }));

  out.push_back(guarded(s, "eig_initial_state", [&] {
    const auto e = hermitian_eig(make_initial_state({}).matrix());
    const std::vector<double> expect{5.0 / 8, 1.0 / 8, 1.0 / 8, 1.0 / 8};
    Worst w;
    for (std::size_t i = 0; i < 4; ++i) w.update(std::abs(e.eigenvalues[i] - expect[i]), fmt::format("index {}", i));
    return below(s, "eig_initial_state", w, 1e-12);
  }));

  out.push_back(guarded(s, "trace_product_explicit", [&] {
    Worst w;
    for (int k = 0; k < 200; ++k) {
      const auto a = random_matrix(rng, 4), b = random_matrix(rng, 4);
      w.update(std::abs(trace_product(a, b) - (a * b).trace()), fmt::format("sample {}", k));
    }
    return below(s, "trace_product_explicit", w, 1e-12);
  }));

  out.push_back(guarded(s, "singular_values_vs_gram", [&] {
    Worst w;
    for (int k = 0; k < 200; ++k) {
      const auto m = random_hermitian(rng, 4);
      const auto sv = singular_values_hermitian(m);
      auto gram = hermitian_eig(m.adjoint() * m).eigenvalues;
      for (std::size_t i = 0; i < 4; ++i)
        w.update(std::abs(sv[i] - std::sqrt(std::max(gram[i], 0.0))), fmt::format("sample {}", k));
    }
    return below(s, "singular_values_vs_gram", w, 1e-9);
  }));
  return out;
}

std::vector<CheckResult> states_suite() {
  const std::string s = "states";
  std::vector<CheckResult> out;

  out.push_back(guarded(s, "initial_state_grid", [&] {
    Worst w;
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const InitialStateParams p{i / 20.0, j / 20.0};
        const auto rho = make_initial_state(p).matrix();
        const auto at = fmt::format("r={} alpha={}", p.r, p.alpha);
        w.update(std::abs(rho.trace() - 1.0), at);
        w.update(hermiticity_defect(rho), at);
        w.update(-hermitian_eig(rho).eigenvalues.back(), at);
      }
    }
    return below(s, "initial_state_grid", w, 1e-10);
  }));

  out.push_back(guarded(s, "purity_monotone_in_r", [&] {
    Worst w;
    for (int j = 0; j <= 20; ++j) {
      double prev = -1.0;
      for (int i = 0; i <= 20; ++i) {
        const double p = purity(make_initial_state({i / 20.0, j / 20.0}));
        w.update(prev - p, fmt::format("r={} alpha={}", i / 20.0, j / 20.0));
        prev = p;
      }
    }
    return below(s, "purity_monotone_in_r", w, 1e-15);
  }));

  out.push_back(guarded(s, "purity_reference", [&] {
    Worst w;
    w.update(std::abs(purity(make_initial_state({})) - 7.0 / 16.0), "r=1/2 alpha=1/sqrt2");
    return below(s, "purity_reference", w, 1e-14);
  }));
  return out;
}

std::vector<CheckResult> channels_suite() {
  const std::string s = "channels";
  std::vector<CheckResult> out;
  const auto rho0 = make_initial_state({});
  const auto times = linspace(0.0, 10.0, 41);

  out.push_back(guarded(s, "trace_hermiticity_preservation", [&] {
    Worst w;
    std::mt19937_64 rng(kSeed + 1);
    const auto probe = random_state(rng, 4);
    for (const auto& fp : grid_families()) {
      for (double mu : kGridMu) {
        for (double t : times) {
          const auto at = fmt::format("{} mu={} t={}", label(fp), mu, t);
          const ChannelSpec spec{fp, mu};
          const auto evolved = evolve(rho0, spec, t).matrix();
          w.update(std::abs(evolved.trace() - 1.0), at);
          const auto map = combined_map(spec, t);
          for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
              const auto img = map.apply(ComplexMatrix::unit(4, i, j));
              w.update(std::abs(img.trace() - (i == j ? 1.0 : 0.0)), at);
            }
          }
          w.update(hermiticity_defect(map.apply(probe)), at);
        }
      }
    }
    return below(s, "trace_hermiticity_preservation", w, 1e-9);
  }));

  out.push_back(guarded(s, "choi_positivity", [&] {
    Worst w;
    for (const auto& fp : grid_families()) {
      if (family_of(fp) == ChannelFamily::SGAD) continue;
      for (double mu : kGridMu) {
        for (double t : times) {
          const auto choi = choi_matrix(combined_map({fp, mu}, t).superop, 4);
          w.update(-hermitian_eig(choi).eigenvalues.back(), fmt::format("{} mu={} t={}", label(fp), mu, t));
        }
      }
    }
    return below(s, "choi_positivity", w, 1e-8);
  }));

  out.push_back(guarded(s, "uncorrelated_factorization", [&] {
    Worst w;
    for (const auto& fp : grid_families()) {
      for (double t : times) {
        const auto un = combined_map({fp, 0.0}, t).superop;
        ComplexMatrix reference;
        if (const auto* d = std::get_if<DephasingParams>(&fp)) {
          reference = superop_from_kraus(dephasing_uncorrelated_kraus(t, *d).operators);
        } else if (const auto* a = std::get_if<ADParams>(&fp)) {
          reference = superop_from_kraus(ad_uncorrelated_kraus(t, *a).operators);
        } else {
          const auto single = single_qubit_map(fp, t);
          reference = tensor_of_maps(single, 2, single, 2);
        }
        w.update(max_abs_diff(un, reference), fmt::format("{} t={}", label(fp), t));
      }
    }
    return below(s, "uncorrelated_factorization", w, 1e-12);
  }));

  out.push_back(guarded(s, "dephasing_frozen_at_mu1", [&] {
    Worst w;
    for (double nu : {0.1, 1.0}) {
      for (double t : times) {
        const auto evolved = evolve(rho0, {DephasingParams{nu}, 1.0}, t).matrix();
        w.update((evolved - rho0.matrix()).frobenius_norm(), fmt::format("nu={} t={}", nu, t));
      }
    }
    return below(s, "dephasing_frozen_at_mu1", w, 1e-10);
  }));

  out.push_back(guarded(s, "closed_form_states", [&] {
    Worst w;
    const InitialStateParams init{};
    for (const auto& fp : grid_families()) {
      if (family_of(fp) == ChannelFamily::SGAD) continue;
      for (double mu : kGridMu) {
        for (double t : times) {
          const auto mapped = evolve(rho0, {fp, mu}, t).matrix();
          const auto closed = family_of(fp) == ChannelFamily::DephasingColored
                                  ? analytic_state_dephasing(std::get<DephasingParams>(fp), init, mu, t)
                                  : analytic_state_ad(std::get<ADParams>(fp), init, mu, t);
          w.update(max_abs_diff(mapped, closed.matrix()), fmt::format("{} mu={} t={}", label(fp), mu, t));
        }
      }
    }
    return below(s, "closed_form_states", w, 1e-9);
  }));

  out.push_back(guarded(s, "closed_form_ad_singular_values", [&] {
    Worst w;
    const InitialStateParams init{};
    for (const auto& fp : {FamilyParams{ADParams{2.0, 1.0}}, FamilyParams{ADParams{0.2, 1.0}}}) {
      for (double mu : kGridMu) {
        for (double t : linspace(0.1, 10.0, 34)) {
          const auto sv = singular_values_hermitian(state_derivative({fp, mu}, init, t));
          const auto closed = analytic_ad_singular_values(std::get<ADParams>(fp), init, mu, t);
          for (std::size_t i = 0; i < 4; ++i)
            w.update(std::abs(sv[i] - closed[i]), fmt::format("{} mu={} t={}", label(fp), mu, t));
        }
      }
    }
    return below(s, "closed_form_ad_singular_values", w, 1e-5);
  }));

  out.push_back(guarded(s, "kraus_completeness", [&] {
    Worst w;
    for (double t : times) {
      for (double nu : {0.1, 1.0}) {
        const DephasingParams d{nu};
        w.update(dephasing_single_kraus(t, d).defect(), fmt::format("dephasing single nu={} t={}", nu, t));
        w.update(dephasing_uncorrelated_kraus(t, d).defect(), fmt::format("dephasing un nu={} t={}", nu, t));
        w.update(dephasing_correlated_kraus(t, d).defect(), fmt::format("dephasing co nu={} t={}", nu, t));
      }
      for (double lambda : {2.0, 0.2}) {
        const ADParams a{lambda, 1.0};
        w.update(ad_single_kraus(t, a).defect(), fmt::format("ad single lambda={} t={}", lambda, t));
        w.update(ad_uncorrelated_kraus(t, a).defect(), fmt::format("ad un lambda={} t={}", lambda, t));
        w.update(ad_correlated_kraus(t, a).defect(), fmt::format("ad co lambda={} t={}", lambda, t));
      }
    }
    return below(s, "kraus_completeness", w, KrausSet::kValidDefect);
  }));

  out.push_back(guarded(s, "mu_range_rejected", [] { return check_mu_range_rejected(); }));
  return out;
}

std::vector<CheckResult> qsl_suite() {
  const std::string s = "qsl";
  std::vector<CheckResult> out;
  const InitialStateParams init{};

  out.push_back(guarded(s, "derivative_analytic_vs_fd", [&] {
    Worst w;
    for (const auto& fp : grid_families()) {
      for (double mu : kGridMu) {
        const ChannelSpec spec{fp, mu};
        for (double t : {0.5, 1.0, 2.0}) {
          const auto analytic = state_derivative(spec, init, t);
          const auto fd = oracle::fd_derivative([&](double x) { return state_at(spec, init, x); }, t, 1e-5);
          w.update((analytic - fd).frobenius_norm(), fmt::format("{} mu={} t={}", label(fp), mu, t));
          w.update(std::abs(analytic.trace()), fmt::format("{} mu={} t={} trace", label(fp), mu, t));
        }
      }
    }
    return below(s, "derivative_analytic_vs_fd", w, 1e-6);
  }));

  out.push_back(guarded(s, "relative_purity_dual_path", [&] {
    const DephasingParams d{1.0};
    const auto rho0 = make_initial_state(init);
    const double mapped = relative_purity(evolve(rho0, {d, 0.0}, 1.0), evolve(rho0, {d, 0.0}, 2.0));
    const double closed =
        relative_purity(analytic_state_dephasing(d, init, 0.0, 1.0), analytic_state_dephasing(d, init, 0.0, 2.0));
    Worst w;
    w.update(std::abs(mapped - closed), "nu=1 mu=0 tau=1 tau_d=1");
    return below(s, "relative_purity_dual_path", w, 1e-9);
  }));

  out.push_back(guarded(s, "quadrature_vs_dense_trapezoid", [&] {
    const ChannelSpec spec{DephasingParams{1.0}, 0.0};
    const auto beta = singular_values_hermitian(state_at(spec, init, 1.0));
    auto f = [&](double t) { return ml_value(state_derivative(spec, init, t), beta); };
    const double simpson = time_average(f, 1.0, 1.0, {kDefaultQuadSteps, kink_times(spec, 1.0, 2.0)}).value;
    const int n = 10 * kDefaultQuadSteps * 8;
    double trap = 0.5 * (f(1.0) + f(2.0));
    for (int k = 1; k < n; ++k) trap += f(1.0 + static_cast<double>(k) / n);
    trap /= n;
    Worst w;
    w.update(std::abs(simpson - trap) / std::abs(trap), "nu=1 mu=0 tau=1 tau_d=1");
    return below(s, "quadrature_vs_dense_trapezoid", w, 1e-6);
  }));

  out.push_back(guarded(s, "dephasing_closed_form_vs_mt_branch", [&] {
    Worst w;
    const DephasingParams d{0.1};
    for (double tau_d : linspace(0.2, 5.0, 25)) {
      const auto r = qsl_time({ChannelSpec{d, 0.0}, init, 1.0, tau_d, kDefaultQuadSteps, {}});
      const double mt_branch = r.numerator / r.mt_avg;
      const double closed = qsl_dephasing_closed_form(d, init, 0.0, 1.0, tau_d);
      w.update(std::abs(closed - mt_branch) / mt_branch, fmt::format("tau_d={}", tau_d));
    }
    return below(s, "dephasing_closed_form_vs_mt_branch", w, 1e-4);
  }));

  out.push_back(guarded(s, "frozen_flag_no_nan", [&] {
    Worst w;
    for (double nu : {0.1, 1.0}) {
      for (double tau_d : {0.01, 1.0, 5.0}) {
        const auto r = qsl_time({ChannelSpec{DephasingParams{nu}, 1.0}, init, 1.0, tau_d, kDefaultQuadSteps, {}});
        const auto at = fmt::format("nu={} tau_d={}", nu, tau_d);
        if (!r.frozen || !std::isfinite(r.tau_qsl) || !std::isfinite(r.f)) w.update(1.0, at);
      }
    }
    return below(s, "frozen_flag_no_nan", w, 0.0);
  }));
  return out;
}

std::vector<CheckResult> oracle_suite() {
  const std::string s = "oracle";
  std::vector<CheckResult> out;
  const auto rho0 = make_initial_state({});

  out.push_back(guarded(s, "map_vs_rk4", [&] {
    Worst w;
    struct Case {
      FamilyParams params;
      std::vector<double> times;
    };
    // Time-local dephasing rates diverge where Lambda = 0 (nu = 1: t ~ 0.94),
    // so nu = 1 is only integrated before that point.
    const std::vector<Case> cases{
        {DephasingParams{0.1}, {0.3, 1.0, 2.5}}, {DephasingParams{1.0}, {0.3}},
        {ADParams{2.0, 1.0}, {0.3, 1.0, 2.5}},   {ADParams{0.2, 1.0}, {0.3, 1.0, 2.5}},
        {SGADParams{1.0, 0.0, 1.0}, {0.3, 1.0, 2.5}}, {SGADParams{1.0, 1.0, 1.0}, {0.3, 1.0, 2.5}},
    };
    for (const auto& c : cases) {
      for (double mu : {0.0, 0.5, 1.0}) {
        for (double t : c.times) {
          const auto mapped = evolve(rho0, {c.params, mu}, t).matrix();
          const auto rk4 = oracle::rk4_mixture(c.params, mu, rho0.matrix(), t);
          w.update(max_abs_diff(mapped, rk4), fmt::format("{} mu={} t={}", label(c.params), mu, t));
        }
      }
    }
    return below(s, "map_vs_rk4", w, 1e-6);
  }));

  out.push_back(guarded(s, "single_qubit_maps_vs_rk4", [&] {
    Worst w;
    std::mt19937_64 rng(kSeed + 2);
    const auto probe = random_state(rng, 2);
    for (const auto& p : {SGADParams{0.0, 0.0, 1.0}, SGADParams{1.0, 0.0, 1.0}, SGADParams{1.0, 1.0, 1.0},
                          SGADParams{2.0, 0.5, 0.7}}) {
      for (double t : {0.3, 1.0, 2.5}) {
        const auto mapped = apply_superop(single_qubit_map(p, t), probe);
        const auto rk4 = oracle::rk4_evolve(oracle::sgad_single_generator(p), probe, t).rho;
        w.update(max_abs_diff(mapped, rk4), fmt::format("sgad {} t={}", describe_params(p), t));
      }
    }
    return below(s, "single_qubit_maps_vs_rk4", w, 1e-6);
  }));

  out.push_back(guarded(s, "ad_probability_vs_rk4", [] { return check_ad_probability_vs_rk4(); }));

  out.push_back(guarded(s, "spectral_eigenoperators", [&] {
    Worst w;
    for (double n : linspace(0.0, 2.0, 5)) {
      for (double frac : linspace(0.0, 0.9, 5)) {
        const SGADParams p{n, frac * (n + 0.5), 1.0};
        const auto rep = oracle::spectral_check(p);
        w.update(rep.worst(), fmt::format("n={} m={}", p.n, p.m));
      }
    }
    return below(s, "spectral_eigenoperators", w, 1e-10);
  }));

  out.push_back(guarded(s, "generators_annihilate_trace", [&] {
    Worst w;
    std::mt19937_64 rng(kSeed + 3);
    for (const auto& fp : grid_families()) {
      for (const auto& gen : {oracle::uncorrelated_generator(fp), oracle::correlated_generator(fp)}) {
        for (int k = 0; k < 100; ++k) {
          ComplexMatrix h = random_hermitian(rng, 4);
          const cplx tr = h.trace();
          for (std::size_t i = 0; i < 4; ++i) h(i, i) += (1.0 - tr) / 4.0;
          w.update(std::abs(gen(0.7, h).trace()), fmt::format("{} {}", gen.name, label(fp)));
        }
      }
    }
    return below(s, "generators_annihilate_trace", w, 1e-10);
  }));

  out.push_back(guarded(s, "rk4_positivity", [&] {
    Worst w;
    for (const auto& fp : grid_families()) {
      const bool telegraph = std::holds_alternative<DephasingParams>(fp) && std::get<DephasingParams>(fp).nu >= 0.25;
      for (double t : telegraph ? std::vector<double>{0.3} : std::vector<double>{0.3, 1.0, 2.5}) {
        for (double mu : {0.0, 0.5, 1.0}) {
          const auto rho = oracle::rk4_mixture(fp, mu, rho0.matrix(), t);
          w.update(-hermitian_eig(rho).eigenvalues.back(), fmt::format("{} mu={} t={}", label(fp), mu, t));
        }
      }
    }
    return below(s, "rk4_positivity", w, 1e-7);
  }));
  return out;
}

// ---------------------------------------------------------------------------

struct FigureGrid {
  FamilyParams params;
  std::vector<double> tau_d;
  // results[mu index][tau_d index]
  std::vector<std::vector<QslResult>> results;
};

FigureGrid compute_grid(const FamilyParams& params) {
  FigureGrid g{params, linspace(0.2, 5.0, 25), {}};
  for (double mu : kGridMu) {
    std::vector<QslResult> row;
    for (double tau_d : g.tau_d) row.push_back(qsl_time({ChannelSpec{params, mu}, InitialStateParams{}, 1.0, tau_d, kDefaultQuadSteps, {}}));
    g.results.push_back(std::move(row));
  }
  return g;
}

// Smallest sign * (tau(mu_{k+1}) - tau(mu_k)) over the grid; sign = +1 for increasing.
Worst ordering_margin(const FigureGrid& g, double sign, std::size_t mu_count) {
  Worst w;
  w.value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < g.tau_d.size(); ++j) {
    for (std::size_t k = 0; k + 1 < mu_count; ++k) {
      const double step = sign * (g.results[k + 1][j].tau_qsl - g.results[k][j].tau_qsl);
      // Track the minimum margin by negating into the "worst" tracker.
      w.update(-step, fmt::format("{} tau_d={} mu {}->{}", label(g.params), g.tau_d[j], kGridMu[k], kGridMu[k + 1]));
    }
  }
  w.value = -w.value;
  return w;
}

CheckResult ordering_check(const std::string& name, const std::vector<FigureGrid>& grids, double sign) {
  Worst worst;
  worst.value = std::numeric_limits<double>::infinity();
  for (const auto& g : grids) {
    const auto m = ordering_margin(g, sign, kGridMu.size());
    if (m.value < worst.value) worst = m;
  }
  CheckResult r;
  r.suite = "figures";
  r.name = name;
  r.measured = worst.value;
  r.tolerance = 1e-10;
  r.passed = worst.value >= 1e-10;
  r.detail = "smallest margin at " + worst.where;
  return r;
}

std::vector<CheckResult> figures_suite() {
  const std::string s = "figures";
  std::vector<CheckResult> out;
  std::map<std::string, std::vector<FigureGrid>> grids;
  try {
    grids["dephasing"] = {compute_grid(DephasingParams{0.1}), compute_grid(DephasingParams{1.0})};
    grids["ad"] = {compute_grid(ADParams{2.0, 1.0}), compute_grid(ADParams{0.2, 1.0})};
    grids["sgad"] = {compute_grid(SGADParams{1.0, 0.0, 1.0}), compute_grid(SGADParams{1.0, 1.0, 1.0})};
  } catch (const std::exception& e) {
    CheckResult r;
    r.suite = s;
    r.name = "figure_grids";
    r.detail = std::string("exception: ") + e.what();
    return {r};
  }

  // Dephasing: mu = 1 is frozen and reports the limit of the bound.
  out.push_back(ordering_check("dephasing_increasing_in_mu", grids["dephasing"], +1.0));
  out.push_back(ordering_check("ad_decreasing_in_mu", grids["ad"], -1.0));
  out.push_back(ordering_check("sgad_decreasing_in_mu", grids["sgad"], -1.0));

  Worst bound, tight;
  for (const auto& [family, list] : grids) {
    for (const auto& g : list) {
      for (std::size_t k = 0; k < kGridMu.size(); ++k) {
        for (std::size_t j = 0; j < g.tau_d.size(); ++j) {
          const auto& r = g.results[k][j];
          const auto at = fmt::format("{} mu={} tau_d={}", label(g.params), kGridMu[k], g.tau_d[j]);
          bound.update(r.tau_qsl - g.tau_d[j], at);
          if (r.frozen) continue;
          tight.update(r.active_bound == Bound::ML ? 0.0 : 1.0, at + " (active bound MT)");
          tight.update(r.ml_avg - r.mt_avg * std::sqrt(r.purity), at);
        }
      }
    }
  }
  out.push_back(below(s, "bound_validity", bound, 1e-6));
  out.push_back(below(s, "ml_tightness", tight, 1e-12));
  return out;
}

} // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::size_t ValidationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

void ValidationReport::write_json(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["passed"] = passed();
  doc["failures"] = failures();
  auto& arr = doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json rec;
    rec["suite"] = c.suite;
    rec["name"] = c.name;
    rec["passed"] = c.passed;
    rec["measured"] = std::isfinite(c.measured) ? nlohmann::ordered_json(c.measured) : nlohmann::ordered_json();
    rec["tolerance"] = c.tolerance;
    rec["detail"] = c.detail;
    arr.push_back(std::move(rec));
  }
  out << doc.dump(2) << '\n';
}

std::vector<std::string> validation_suites() { return {"linalg", "states", "channels", "qsl", "oracle", "figures"}; }

ValidationReport run_validation(const std::vector<std::string>& suites) {
  const auto known = validation_suites();
  const auto& chosen = suites.empty() ? known : suites;
  for (const auto& name : chosen)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ParamOutOfRange(fmt::format("unknown validation suite '{}'", name));

  ValidationReport report;
  for (const auto& name : known) {
    if (std::find(chosen.begin(), chosen.end(), name) == chosen.end()) continue;
    std::vector<CheckResult> part;
    if (name == "linalg") part = linalg_suite();
    if (name == "states") part = states_suite();
    if (name == "channels") part = channels_suite();
    if (name == "qsl") part = qsl_suite();
    if (name == "oracle") part = oracle_suite();
    if (name == "figures") part = figures_suite();
    report.checks.insert(report.checks.end(), part.begin(), part.end());
  }
  return report;
}

CheckResult check_ad_probability_vs_rk4(const ProbabilityFn& probability) {
  const std::string s = "oracle";
  const std::string name = "ad_probability_vs_rk4";
  return guarded(s, name, [&] {
    Worst w;
    const ComplexMatrix excited = ComplexMatrix::unit(2, 0, 0);
    for (double lambda : {2.0, 0.2}) {
      const ADParams p{lambda, 1.0};
      const auto gen = oracle::ad_single_generator(p);
      for (double t : {0.5, 1.0, 2.0, 3.0}) {
        const auto rk4 = oracle::rk4_evolve(gen, excited, t).rho;
        const double expected = 1.0 - probability(t, p);
        w.update(std::abs(rk4(0, 0).real() - expected), fmt::format("lambda={} t={}", lambda, t));
      }
    }
    return below(s, name, w, 1e-7);
  });
}

CheckResult check_mu_range_rejected() {
  CheckResult r;
  r.suite = "channels";
  r.name = "mu_range_rejected";
  r.tolerance = 0.0;
  std::size_t accepted = 0;
  for (double mu : {-0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
    try {
      ChannelSpec{DephasingParams{}, mu}.validate();
      ++accepted;
    } catch (const ParamOutOfRange&) {
    }
  }
  r.measured = static_cast<double>(accepted);
  r.passed = accepted == 0;
  r.detail = fmt::format("{} out-of-range mu values accepted", accepted);
  return r;
}

} // namespace cqsl
