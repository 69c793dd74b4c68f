#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cqsl/errors.hpp"
#include "cqsl/oracle.hpp"
#include "cqsl/qsl.hpp"
#include "cqsl/validate.hpp"
#include "support.hpp"

using namespace cqsl;
using Catch::Matchers::WithinAbs;

TEST_CASE("zero generator leaves the state alone", "[oracle][rk4]") {
  std::mt19937_64 rng(4);
  const auto rho = testsupport::random_state(rng, 4);
  const auto out = oracle::rk4_evolve(oracle::zero_generator(4), rho, 2.0);
  CHECK(max_abs_diff(out.rho, rho) <= 1e-15);
  CHECK(out.steps == 2000);
}

TEST_CASE("RK4 amplitude damping reproduces the decay law", "[oracle][rk4]") {
  const ComplexMatrix excited = ComplexMatrix::unit(2, 0, 0);
  for (double lambda : {2.0, 0.2}) {
    const ADParams p{lambda, 1.0};
    for (double t : {0.5, 1.0, 3.0}) {
      const auto out = oracle::rk4_evolve(oracle::ad_single_generator(p), excited, t);
      CHECK_THAT(out.rho(0, 0).real(), WithinAbs(1 - ad_probability(t, p), 1e-7));
    }
  }
}

TEST_CASE("RK4 rejects a step that is too coarse", "[oracle][rk4]") {
  const SGADParams fast{1.0, 0.0, 40.0};
  const auto rho = ComplexMatrix::unit(2, 0, 0);
  CHECK_THROWS_AS(oracle::rk4_evolve(oracle::sgad_single_generator(fast), rho, 0.1, {0.025, true, 1e-7, 1e-8}),
                  StepTooLarge);
  CHECK_THROWS_AS(oracle::rk4_evolve(oracle::zero_generator(2), rho, 1.0, {0.0, true, 1e-7, 1e-8}), ParamOutOfRange);
  CHECK_THROWS_AS(oracle::rk4_evolve(oracle::zero_generator(4), rho, 1.0), DimensionMismatch);
}

TEST_CASE("generators annihilate the trace", "[oracle][property]") {
  std::mt19937_64 rng(8);
  const std::vector<FamilyParams> fams{DephasingParams{1.0}, ADParams{0.2, 1.0}, SGADParams{1.0, 1.0, 1.0}};
  for (const auto& fp : fams) {
    for (const auto& gen : {oracle::uncorrelated_generator(fp), oracle::correlated_generator(fp)}) {
      for (int k = 0; k < 100; ++k) {
        const auto rho = testsupport::random_state(rng, 4);
        CHECK(std::abs(gen(0.4, rho).trace()) <= 1e-10);
      }
    }
  }
}

TEST_CASE("spectral decomposition of the squeezed generator", "[oracle][spectral]") {
  const auto zero = oracle::spectral_check(SGADParams{0.0, 0.0, 1.0});
  CHECK_THAT(zero.eta[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(zero.eta[1], WithinAbs(-0.5, 1e-15));
  CHECK_THAT(zero.eta[2], WithinAbs(-0.5, 1e-15));
  CHECK_THAT(zero.eta[3], WithinAbs(-1.0, 1e-15));
  CHECK(zero.worst() <= 1e-10);

  const auto sq = oracle::spectral_check(SGADParams{1.0, 0.7, 2.0});
  CHECK_THAT(sq.eta[1], WithinAbs(-2.0 * (1.0 + 0.7 + 0.5), 1e-14));
  CHECK_THAT(sq.eta[2], WithinAbs(-2.0 * (1.0 - 0.7 + 0.5), 1e-14));
  CHECK_THAT(sq.eta[3], WithinAbs(-4.0 * 1.5, 1e-14));

  for (double n : {0.0, 0.5, 1.0, 1.5, 2.0})
    for (double frac : {0.0, 0.2, 0.45, 0.7, 0.9}) {
      const auto rep = oracle::spectral_check(SGADParams{n, frac * (n + 0.5), 1.0});
      CHECK(rep.right_residual <= 1e-10);
      CHECK(rep.left_residual <= 1e-10);
      CHECK(rep.biorthogonality_residual <= 1e-10);
    }

  // At n = 0 the stationary state is the ground state |1><1|.
  const auto gen = oracle::sgad_single_generator(SGADParams{0.0, 0.0, 1.0});
  CHECK(gen(0.0, ComplexMatrix::unit(2, 1, 1)).frobenius_norm() <= 1e-15);
}

TEST_CASE("fd_derivative", "[oracle][fd]") {
  const auto fixed = ComplexMatrix::identity(2);
  CHECK(oracle::fd_derivative([&](double) { return fixed; }, 1.0, 1e-3).frobenius_norm() == 0.0);

  const auto d = oracle::fd_derivative(
      [](double t) {
        ComplexMatrix m(2, 2);
        m(0, 0) = std::exp(-t);
        return m;
      },
      0.8, 1e-4);
  CHECK_THAT(d(0, 0).real(), WithinAbs(-std::exp(-0.8), 1e-8));
  CHECK_THROWS_AS(oracle::fd_derivative([&](double) { return fixed; }, 1.0, 0.0), ParamOutOfRange);
}

TEST_CASE("mixture oracle matches the maps", "[oracle][rk4]") {
  const auto rho0 = make_initial_state({});
  for (const FamilyParams& fp :
       {FamilyParams{DephasingParams{0.1}}, FamilyParams{ADParams{2.0, 1.0}}, FamilyParams{SGADParams{1.0, 1.0, 1.0}}})
    for (double mu : {0.0, 0.5, 1.0})
      CHECK(max_abs_diff(evolve(rho0, {fp, mu}, 1.0).matrix(), oracle::rk4_mixture(fp, mu, rho0.matrix(), 1.0)) <=
            1e-6);
}

TEST_CASE("validation check catches a corrupted decay law", "[oracle][mutation]") {
  CHECK(check_ad_probability_vs_rk4().passed);
  const auto flipped = check_ad_probability_vs_rk4([](double t, const ADParams& p) { return -ad_probability(t, p); });
  CHECK_FALSE(flipped.passed);
  const auto shifted =
      check_ad_probability_vs_rk4([](double t, const ADParams& p) { return ad_probability(t, p) + 1e-5; });
  CHECK_FALSE(shifted.passed);
  CHECK(check_mu_range_rejected().passed);
}
