// Acceptance gate: one [PASS]/[FAIL] line per criterion, tolerances pinned
// below. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cqsl/closed_form.hpp"
#include "cqsl/oracle.hpp"
#include "cqsl/qsl.hpp"
#include "cqsl/sweep.hpp"

using namespace cqsl;

namespace {

constexpr double kOrderingMargin = 1e-10;
constexpr double kBoundSlack = 1e-6;
constexpr double kTightnessTol = 1e-12;
constexpr double kOracleTol = 1e-6;
constexpr double kClosedFormTol = 1e-9;
constexpr double kSingularValueTol = 1e-5;
constexpr double kTraceTol = 1e-9;
constexpr double kHermiticityTol = 1e-9;
constexpr double kChoiTol = -1e-8;
constexpr double kSpectralTol = 1e-10;

const std::vector<double> kMu{0.0, 0.25, 0.5, 0.75, 1.0};

int g_failed = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ". " << title << ": " << detail << std::endl;
  if (!ok) ++g_failed;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string label(const FamilyParams& p) { return fmt::format("{} {}", to_string(family_of(p)), describe_params(p)); }

struct Grid {
  FamilyParams params;
  std::vector<double> tau_d = linspace(0.2, 5.0, 25);
  std::vector<std::vector<QslResult>> at;  // [mu][tau_d]
};

Grid compute(const FamilyParams& params) {
  Grid g{params, linspace(0.2, 5.0, 25), {}};
  for (double mu : kMu) {
    std::vector<QslResult> row;
    for (double td : g.tau_d) row.push_back(qsl_time({ChannelSpec{params, mu}, InitialStateParams{}, 1.0, td, kDefaultQuadSteps, {}}));
    g.at.push_back(std::move(row));
  }
  return g;
}

// Smallest sign * (tau_qsl[k+1] - tau_qsl[k]) across the grid and where it occurs.
std::pair<double, std::string> min_margin(const std::vector<Grid>& grids, double sign) {
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& g : grids)
    for (std::size_t j = 0; j < g.tau_d.size(); ++j)
      for (std::size_t k = 0; k + 1 < kMu.size(); ++k) {
        const double m = sign * (g.at[k + 1][j].tau_qsl - g.at[k][j].tau_qsl);
        if (m < worst) {
          worst = m;
          where = fmt::format("{} tau_d={:.1f} mu {}->{}", label(g.params), g.tau_d[j], kMu[k], kMu[k + 1]);
        }
      }
  return {worst, where};
}

void ordering(int id, const std::string& title, const std::vector<Grid>& grids, double sign, double seconds,
              double budget) {
  const auto [margin, where] = min_margin(grids, sign);
  std::size_t violations = 0, pairs = 0;
  for (const auto& g : grids)
    for (std::size_t j = 0; j < g.tau_d.size(); ++j)
      for (std::size_t k = 0; k + 1 < kMu.size(); ++k, ++pairs)
        violations += sign * (g.at[k + 1][j].tau_qsl - g.at[k][j].tau_qsl) < kOrderingMargin ? 1 : 0;
  const bool ok = margin >= kOrderingMargin && seconds < budget;
  report(id, title, ok,
         fmt::format("min margin {:.3e} (need >= {:.0e}) at {}; {}/{} adjacent pairs violate; {:.1f} s (limit {:.0f} s)",
                     margin, kOrderingMargin, where, violations, pairs, seconds, budget));
}

std::string render_preset(const std::string& name, unsigned threads) {
  auto c = preset_config(name);
  c.threads = threads;
  std::ostringstream out;
  write_csv(out, c, run_sweep(c));
  return out.str();
}

} // namespace

int main() {
  const InitialStateParams init{};
  const auto rho0 = make_initial_state(init);

  // 1-3: figure orderings on tau_d in linspace(0.2, 5, 25), tau = 1.
  std::vector<Grid> dephasing, ad, sgad;
  {
    Stopwatch sw;
    dephasing = {compute(DephasingParams{0.1}), compute(DephasingParams{1.0})};
    ordering(1, "dephasing tau_qsl increasing in mu (nu=0.1, 1; mu=1 is the frozen limit)", dephasing, +1.0,
             sw.seconds(), 10.0);
  }
  {
    Stopwatch sw;
    ad = {compute(ADParams{2.0, 1.0}), compute(ADParams{0.2, 1.0})};
    ordering(2, "AD tau_qsl decreasing in mu (lambda=2, 0.2)", ad, -1.0, sw.seconds(), 20.0);
  }
  {
    Stopwatch sw;
    sgad = {compute(SGADParams{1.0, 0.0, 1.0}), compute(SGADParams{1.0, 1.0, 1.0})};
    ordering(3, "SGAD tau_qsl decreasing in mu ((n,m)=(1,0), (1,1))", sgad, -1.0, sw.seconds(), 30.0);
  }

  std::vector<Grid> all;
  for (auto* list : {&dephasing, &ad, &sgad}) all.insert(all.end(), list->begin(), list->end());

  {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t points = 0;
    for (const auto& g : all)
      for (const auto& row : g.at)
        for (std::size_t j = 0; j < g.tau_d.size(); ++j, ++points) worst = std::max(worst, row[j].tau_qsl - g.tau_d[j]);
    report(4, "bound validity tau_qsl <= tau_d", worst <= kBoundSlack,
           fmt::format("max(tau_qsl - tau_d) = {:.3e} (limit {:.0e}) over {} points", worst, kBoundSlack, points));
  }

  {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t mt_active = 0, checked = 0;
    for (const auto& g : all)
      for (const auto& row : g.at)
        for (const auto& r : row) {
          if (r.frozen) continue;
          ++checked;
          mt_active += r.active_bound == Bound::ML ? 0 : 1;
          worst = std::max(worst, r.ml_avg - r.mt_avg * std::sqrt(r.purity));
        }
    report(5, "ML bound active and ml_avg <= mt_avg sqrt(purity)", mt_active == 0 && worst <= kTightnessTol,
           fmt::format("{} of {} nonfrozen points pick MT; max(ml - mt sqrt(P)) = {:.3e} (limit {:.0e})", mt_active,
                       checked, worst, kTightnessTol));
  }

  {
    Stopwatch sw;
    struct Case {
      FamilyParams params;
      std::vector<double> times;
    };
    // Time-local telegraph dephasing rates diverge at Lambda = 0 (nu = 1: t ~ 0.94).
    const std::vector<Case> cases{{DephasingParams{0.1}, {0.3, 1.0, 2.5}}, {DephasingParams{1.0}, {0.3}},
                                  {ADParams{2.0, 1.0}, {0.3, 1.0, 2.5}},   {ADParams{0.2, 1.0}, {0.3, 1.0, 2.5}},
                                  {SGADParams{1.0, 0.0, 1.0}, {0.3, 1.0, 2.5}},
                                  {SGADParams{1.0, 1.0, 1.0}, {0.3, 1.0, 2.5}}};
    double worst = 0.0;
    std::string where;
    for (const auto& c : cases)
      for (double mu : {0.0, 0.5, 1.0})
        for (double t : c.times) {
          const double d = max_abs_diff(evolve(rho0, {c.params, mu}, t).matrix(),
                                        oracle::rk4_mixture(c.params, mu, rho0.matrix(), t));
          if (d > worst) {
            worst = d;
            where = fmt::format("{} mu={} t={}", label(c.params), mu, t);
          }
        }
    // The published correlated SGAD solution, for the record.
    const SGADParams sq{1.0, 1.0, 1.0};
    double published = 0.0;
    for (double t : {0.3, 1.0, 2.5})
      published = std::max(published, max_abs_diff(sgad_correlated_published(rho0.matrix(), t, sq),
                                                    oracle::rk4_evolve(oracle::sgad_correlated_generator(sq),
                                                                       rho0.matrix(), t)
                                                        .rho));
    report(6, "maps vs RK4 of the generators", worst <= kOracleTol,
           fmt::format("max entry diff {:.3e} (limit {:.0e}) at {}; published correlated SGAD form differs by {:.3e}, "
                       "RK4 used; {:.1f} s",
                       worst, kOracleTol, where, published, sw.seconds()));
  }

  {
    double states = 0.0, sv = 0.0;
    const auto times = linspace(0.0, 10.0, 41);
    for (double mu : kMu)
      for (double t : times) {
        for (double nu : {0.1, 1.0}) {
          const DephasingParams d{nu};
          states = std::max(states, max_abs_diff(evolve(rho0, {d, mu}, t).matrix(),
                                                 analytic_state_dephasing(d, init, mu, t).matrix()));
        }
        for (double lambda : {2.0, 0.2}) {
          const ADParams a{lambda, 1.0};
          states = std::max(states,
                            max_abs_diff(evolve(rho0, {a, mu}, t).matrix(), analytic_state_ad(a, init, mu, t).matrix()));
          if (t == 0.0) continue;
          const ChannelSpec spec{a, mu};
          const auto fd = oracle::fd_derivative([&](double x) { return state_at(spec, init, x); }, t, 1e-5);
          const auto computed = singular_values_hermitian(fd);
          const auto closed = analytic_ad_singular_values(a, init, mu, t);
          for (std::size_t i = 0; i < 4; ++i) sv = std::max(sv, std::abs(computed[i] - closed[i]));
        }
      }
    report(7, "closed-form states and AD singular values", states <= kClosedFormTol && sv <= kSingularValueTol,
           fmt::format("state entries {:.3e} (limit {:.0e}); singular values {:.3e} (limit {:.0e})", states,
                       kClosedFormTol, sv, kSingularValueTol));
  }

  {
    double trace = 0.0, herm = 0.0, choi = std::numeric_limits<double>::infinity();
    const std::vector<FamilyParams> fams{DephasingParams{0.1}, DephasingParams{1.0}, ADParams{2.0, 1.0},
                                         ADParams{0.2, 1.0},   SGADParams{1.0, 0.0, 1.0}, SGADParams{1.0, 1.0, 1.0}};
    const auto probe = make_initial_state({0.8, 0.4}).matrix();
    for (const auto& fp : fams)
      for (double mu : kMu)
        for (double t : linspace(0.0, 10.0, 41)) {
          const auto map = combined_map({fp, mu}, t);
          for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
              trace = std::max(trace, std::abs(map.apply(ComplexMatrix::unit(4, i, j)).trace() - (i == j ? 1.0 : 0.0)));
          herm = std::max(herm, hermiticity_defect(map.apply(probe)));
          if (family_of(fp) != ChannelFamily::SGAD)
            choi = std::min(choi, hermitian_eig(choi_matrix(map.superop, 4)).eigenvalues.back());
        }
    report(8, "trace, Hermiticity and Choi positivity", trace <= kTraceTol && herm <= kHermiticityTol && choi >= kChoiTol,
           fmt::format("trace {:.3e} (limit {:.0e}); hermiticity {:.3e} (limit {:.0e}); min Choi eigenvalue {:.3e} "
                       "(limit {:.0e})",
                       trace, kTraceTol, herm, kHermiticityTol, choi, kChoiTol));
  }

  {
    double worst = 0.0;
    for (double n : linspace(0.0, 2.0, 5))
      for (double frac : linspace(0.0, 0.9, 5)) worst = std::max(worst, oracle::spectral_check({n, frac * (n + 0.5), 1.0}).worst());
    report(9, "squeezed-generator eigenoperators", worst <= kSpectralTol,
           fmt::format("worst residual {:.3e} (limit {:.0e}) over a 5x5 (n, m) grid", worst, kSpectralTol));
  }

  {
    Stopwatch sw;
    std::vector<std::string> differing;
    std::size_t bytes = 0;
    for (const auto& name : preset_names()) {
      const auto first = render_preset(name, 1);
      const auto second = render_preset(name, 2);
      bytes += first.size();
      if (first != second) differing.push_back(name);
    }
    report(10, "preset output is byte-identical across runs", differing.empty(),
           fmt::format("{} presets, {} bytes each pass, {} differ; second pass on 2 threads; {:.1f} s",
                       preset_names().size(), bytes, differing.size(), sw.seconds()));
  }

  std::cout << (g_failed == 0 ? "all criteria passed" : fmt::format("{} of 10 criteria failed", g_failed)) << std::endl;
  return g_failed == 0 ? 0 : 1;
}
