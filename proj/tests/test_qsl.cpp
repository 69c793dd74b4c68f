#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "cqsl/closed_form.hpp"
#include "cqsl/errors.hpp"
#include "cqsl/qsl.hpp"
#include "support.hpp"

using namespace cqsl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const InitialStateParams kInit{};

QslResult run(const FamilyParams& fp, double mu, double tau, double tau_d) {
  return qsl_time({ChannelSpec{fp, mu}, kInit, tau, tau_d, kDefaultQuadSteps, {}});
}

// Trapezoid over n panels of the mean of f on [a, a + len].
template <class F>
double trapezoid_mean(F&& f, double a, double len, int n) {
  double s = 0.5 * (f(a) + f(a + len));
  for (int k = 1; k < n; ++k) s += f(a + len * k / n);
  return s / n;
}

} // namespace

TEST_CASE("relative purity", "[qsl]") {
  const auto rho = make_initial_state(kInit);
  CHECK_THAT(relative_purity(rho, rho), WithinAbs(1.0, 1e-15));

  const auto mixed = make_initial_state({0.0, 0.0});
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix other(testsupport::random_state(rng, 4));
    CHECK_THAT(relative_purity(mixed, other), WithinAbs(1.0, 1e-12));
  }

  // Dephasing nu = 1, mu = 0: closed-form coherences give
  // f = (sum of squared populations + 2 c^2 L1^2 L2^2) / (same with L1^4).
  const DephasingParams d{1.0};
  const double l1 = dephasing_kernel(1.0, d).lambda, l2 = dephasing_kernel(2.0, d).lambda;
  const double pops = 2 * (1.0 / 64) + 2 * (9.0 / 64), c = 0.25;
  const double expected = (pops + 2 * c * c * l1 * l1 * l2 * l2) / (pops + 2 * c * c * std::pow(l1, 4));
  const double mapped = relative_purity(evolve(rho, {d, 0.0}, 1.0), evolve(rho, {d, 0.0}, 2.0));
  CHECK_THAT(mapped, WithinAbs(expected, 1e-9));
}

TEST_CASE("state derivative", "[qsl][derivative]") {
  for (double t : {0.0, 0.7, 3.0})
    CHECK(state_derivative({DephasingParams{1.0}, 1.0}, kInit, t).frobenius_norm() == 0.0);
  CHECK(state_derivative({ADParams{2.0, 1.0}, 0.5}, kInit, 0.0).frobenius_norm() <= 1e-15);

  const std::vector<FamilyParams> fams{DephasingParams{0.1}, DephasingParams{1.0}, ADParams{2.0, 1.0},
                                       ADParams{0.2, 1.0},   SGADParams{1.0, 0.0, 1.0}, SGADParams{1.0, 1.0, 1.0}};
  for (const auto& fp : fams) {
    for (double mu : {0.0, 0.5, 1.0}) {
      const ChannelSpec spec{fp, mu};
      for (double t : {0.5, 1.0, 2.0}) {
        const auto analytic = state_derivative(spec, kInit, t);
        const auto fd = state_derivative(spec, kInit, t, {DerivMode::FiniteDifference, kDefaultFdStep});
        CHECK((analytic - fd).frobenius_norm() <= 1e-6);
        CHECK(std::abs(analytic.trace()) <= 1e-12);
        CHECK(hermiticity_defect(analytic) <= 1e-14);
        CHECK(std::abs(fd.trace()) <= 1e-8);
      }
      // One-sided difference near t = 0.
      const auto early = state_derivative(spec, kInit, 2e-6, {DerivMode::FiniteDifference, 1e-5});
      CHECK((early - state_derivative(spec, kInit, 2e-6)).frobenius_norm() <= 1e-6);
    }
  }
}

TEST_CASE("ML and MT integrands for dephasing", "[qsl][integrand]") {
  const ChannelSpec spec{DephasingParams{1.0}, 0.3};
  const double tau = 1.0;
  const auto beta = hermitian_eig(state_at(spec, kInit, tau)).eigenvalues;
  for (double t : {1.2, 1.5, 1.9}) {
    const auto dot = state_derivative(spec, kInit, t);
    const double c = std::abs(dot(1, 2));
    const auto sv = singular_values_hermitian(dot);
    CHECK_THAT(sv[0], WithinAbs(c, 1e-15));
    CHECK_THAT(sv[1], WithinAbs(c, 1e-15));
    CHECK(sv[2] <= 1e-15);
    CHECK_THAT(ml_integrand(spec, kInit, tau, t), WithinAbs(c * (beta[0] + beta[1]), 1e-14));
    CHECK_THAT(mt_integrand(spec, kInit, t), WithinAbs(std::sqrt(2.0) * c, 1e-14));
  }
  CHECK(ml_integrand({DephasingParams{1.0}, 1.0}, kInit, 1.0, 1.5) == 0.0);
  CHECK(mt_integrand({DephasingParams{1.0}, 1.0}, kInit, 1.5) == 0.0);
}

TEST_CASE("ML pairing maximizes over permutations", "[qsl][integrand]") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    ComplexMatrix dot = testsupport::random_hermitian(rng, 4);
    const auto sv = singular_values_hermitian(dot);
    const auto beta = hermitian_eig(testsupport::random_state(rng, 4)).eigenvalues;
    std::array<int, 4> perm{0, 1, 2, 3};
    double best = 0.0;
    do {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += sv[i] * beta[perm[i]];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<double> shuffled(beta.begin(), beta.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK_THAT(ml_value(dot, shuffled), WithinAbs(best, 1e-13));
    CHECK_THAT(mt_value(dot), WithinAbs(dot.frobenius_norm(), 1e-13));
  }
}

TEST_CASE("time_average", "[qsl][quadrature]") {
  const auto c = time_average([](double) { return 2.5; }, 0.3, 1.7);
  CHECK_THAT(c.value, WithinAbs(2.5, 1e-14));

  const auto sq = time_average([](double t) { return t * t; }, 0.0, 1.0, {8, {}});
  CHECK_THAT(sq.value, WithinAbs(1.0 / 3.0, 1e-15));
  const auto cube = time_average([](double t) { return t * t * t; }, 1.0, 2.0, {8, {1.37}});
  CHECK_THAT(cube.value, WithinAbs((81.0 - 1.0) / 4.0 / 2.0, 1e-13));

  // |t - k| with the kink passed as a breakpoint converges at once.
  const double k = 1.0 / std::numbers::pi;
  const auto kinked = time_average([k](double t) { return std::abs(t - k); }, 0.0, 1.0, {8, {k}});
  CHECK_THAT(kinked.value, WithinAbs((k * k + (1 - k) * (1 - k)) / 2, 1e-14));

  CHECK_THROWS_AS(time_average([k](double t) { return t < k ? 0.0 : 1.0; }, 0.0, 1.0), QuadratureNonConvergent);
  CHECK_THROWS_AS(time_average([](double t) { return t; }, 0.0, 1.0, {7, {}}), ParamOutOfRange);
  CHECK_THROWS_AS(time_average([](double t) { return t; }, 0.0, 0.0), ParamOutOfRange);

  const auto multi = time_average_multi([](double t) { return std::vector<double>{1.0, t}; }, 2, 0.0, 2.0);
  REQUIRE(multi.size() == 2);
  CHECK_THAT(multi[0].value, WithinAbs(1.0, 1e-15));
  CHECK_THAT(multi[1].value, WithinAbs(1.0, 1e-15));
}

TEST_CASE("ML average against a dense trapezoid", "[qsl][quadrature]") {
  const ChannelSpec spec{DephasingParams{1.0}, 0.0};
  const auto r = run(spec.params, 0.0, 1.0, 1.0);
  const double dense = trapezoid_mean([&](double t) { return ml_integrand(spec, kInit, 1.0, t); }, 1.0, 1.0, 40000);
  CHECK_THAT(r.ml_avg, WithinRel(dense, 1e-6));
}

TEST_CASE("qsl_time basic behaviour", "[qsl]") {
  const auto small = run(DephasingParams{1.0}, 0.0, 1.0, 1e-5);
  CHECK(small.tau_qsl < 1e-4);
  CHECK(small.tau_qsl >= 0.0);

  for (const FamilyParams& fp : {FamilyParams{DephasingParams{1.0}}, FamilyParams{ADParams{0.2, 1.0}},
                                 FamilyParams{SGADParams{1.0, 1.0, 1.0}}}) {
    const auto r = run(fp, 0.25, 1.0, 2.0);
    CHECK_FALSE(r.frozen);
    CHECK(r.active_bound == Bound::ML);
    CHECK(r.tau_qsl <= 2.0 + 1e-6);
    CHECK(r.ml_avg <= r.mt_avg * std::sqrt(r.purity) + 1e-12);
    CHECK_THAT(r.tau_qsl, WithinRel(r.numerator / r.ml_avg, 1e-12));
    CHECK_THAT(std::abs(r.f - 1) * r.purity, WithinRel(r.numerator, 1e-9));
  }

  CHECK_THROWS_AS(run(DephasingParams{1.0}, 0.0, -1.0, 1.0), ParamOutOfRange);
  CHECK_THROWS_AS(run(DephasingParams{1.0}, 0.0, 1.0, 0.0), ParamOutOfRange);
  CHECK_THROWS_AS(qsl_time({ChannelSpec{DephasingParams{1.0}, 0.0}, kInit, 1.0, 1.0, 513, {}}), ParamOutOfRange);
}

TEST_CASE("qsl_time figure trends at tau = 1, tau_d = 1", "[qsl][figures]") {
  // Dephasing nu = 1: correlation slows the evolution down.
  CHECK(run(DephasingParams{1.0}, 0.75, 1.0, 1.0).tau_qsl > run(DephasingParams{1.0}, 0.0, 1.0, 1.0).tau_qsl);
  // AD lambda = 0.2 gamma0: fully correlated is faster than uncorrelated.
  CHECK(run(ADParams{0.2, 1.0}, 1.0, 1.0, 1.0).tau_qsl < run(ADParams{0.2, 1.0}, 0.0, 1.0, 1.0).tau_qsl);
}

TEST_CASE("frozen dephasing reports the mu -> 1 limit", "[qsl][frozen]") {
  for (double nu : {0.1, 1.0}) {
    const DephasingParams d{nu};
    for (double tau_d : {0.5, 2.0}) {
      const auto r = run(d, 1.0, 1.0, tau_d);
      CHECK(r.frozen);
      CHECK(std::isfinite(r.tau_qsl));
      // c |Delta Lambda^2| / ((beta1 + beta2) mean |Lambda dLambda/dt|); rho stays rho0,
      // c = 1/4 and beta1 + beta2 = 5/8 + 1/8.
      const double l0 = dephasing_kernel(1.0, d).lambda, l1 = dephasing_kernel(1.0 + tau_d, d).lambda;
      const double mean = trapezoid_mean(
          [&](double t) {
            const auto k = dephasing_kernel(t, d);
            return std::abs(k.lambda * k.lambda_rate);
          },
          1.0, tau_d, 200000);
      const double expected = 0.25 * std::abs(l1 * l1 - l0 * l0) / (0.75 * mean);
      CHECK_THAT(r.tau_qsl, WithinRel(expected, 1e-6));
      // Approaching mu = 1 from below gives the same value.
      CHECK_THAT(run(d, 1.0 - 1e-7, 1.0, tau_d).tau_qsl, WithinRel(expected, 1e-5));
    }
  }
  CHECK(run(ADParams{2.0, 1.0}, 0.5, 0.0, 1.0).frozen == false);
}

TEST_CASE("dephasing closed form", "[qsl][closed-form]") {
  const DephasingParams markov{0.1};
  CHECK(std::abs(qsl_dephasing_closed_form(markov, kInit, 0.0, 1.0, 1e-7)) < 1e-5);

  for (double tau_d : {0.2, 1.0, 3.0, 5.0}) {
    const auto r = run(markov, 0.0, 1.0, tau_d);
    CHECK_THAT(qsl_dephasing_closed_form(markov, kInit, 0.0, 1.0, tau_d), WithinRel(r.numerator / r.mt_avg, 1e-4));
  }

  const DephasingParams nm{1.0};
  const double at1 = qsl_dephasing_closed_form(nm, kInit, 1.0, 0.5, 1.0);
  const double at0 = qsl_dephasing_closed_form(nm, kInit, 0.0, 0.5, 1.0);
  CHECK(std::isfinite(at1));
  CHECK(at1 > 0.0);
  CHECK(at1 > at0);
}

TEST_CASE("kink times sit on zeros of the kernel and its rate", "[qsl]") {
  const ChannelSpec spec{DephasingParams{1.0}, 0.0};
  const auto kinks = kink_times(spec, 0.0, 5.0);
  REQUIRE_FALSE(kinks.empty());
  for (double t : kinks) {
    const auto k = dephasing_kernel(t, DephasingParams{1.0});
    CHECK(std::min(std::abs(k.lambda), std::abs(k.lambda_rate)) <= 1e-9);
  }
  CHECK(kink_times({DephasingParams{0.1}, 0.0}, 0.5, 5.0).empty());
}
