#include <catch_amalgamated.hpp>

#include <cmath>

#include "cqsl/errors.hpp"
#include "cqsl/states.hpp"

using namespace cqsl;
using Catch::Matchers::WithinAbs;

TEST_CASE("initial state examples", "[states]") {
  const auto mixed = make_initial_state({0.0, 0.3});
  CHECK(max_abs_diff(mixed.matrix(), cplx{0.25} * ComplexMatrix::identity(4)) <= 1e-15);
  CHECK_THAT(purity(mixed), WithinAbs(0.25, 1e-15));

  const auto pure = make_initial_state({1.0, 0.0});
  CHECK(max_abs_diff(pure.matrix(), ComplexMatrix::unit(4, 1, 1)) <= 1e-15);
  CHECK_THAT(purity(pure), WithinAbs(1.0, 1e-15));

  const auto rho = make_initial_state({0.5, 1.0 / std::sqrt(2.0)});
  CHECK_THAT(rho(0, 0).real(), WithinAbs(1.0 / 8, 1e-15));
  CHECK_THAT(rho(1, 1).real(), WithinAbs(3.0 / 8, 1e-15));
  CHECK_THAT(rho(2, 2).real(), WithinAbs(3.0 / 8, 1e-15));
  CHECK_THAT(rho(3, 3).real(), WithinAbs(1.0 / 8, 1e-15));
  CHECK_THAT(rho(1, 2).real(), WithinAbs(0.25, 1e-15));
  CHECK_THAT(rho(2, 1).real(), WithinAbs(0.25, 1e-15));
  CHECK_THAT(rho.matrix().trace().real(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(purity(rho), WithinAbs(7.0 / 16.0, 1e-15));
}

TEST_CASE("initial state grid satisfies density-matrix invariants", "[states][property]") {
  for (int i = 0; i <= 20; ++i) {
    double previous = 0.0;
    for (int j = 0; j <= 20; ++j) {
      // r varies fastest here, alpha fixed per outer loop
      const InitialStateParams p{j / 20.0, i / 20.0};
      const auto rho = make_initial_state(p);
      const auto& m = rho.matrix();
      CHECK(std::abs(m.trace() - 1.0) <= 1e-10);
      CHECK(hermiticity_defect(m) <= 1e-10);
      CHECK(hermitian_eig(m).eigenvalues.back() >= -1e-9);
      const double pur = purity(rho);
      CHECK(pur >= 0.25 - 1e-12);
      CHECK(pur <= 1.0 + 1e-12);
      CHECK(pur >= previous - 1e-15);
      previous = pur;
    }
  }
}

TEST_CASE("initial state parameter validation", "[states]") {
  CHECK_THROWS_AS(make_initial_state({-0.1, 0.5}), ParamOutOfRange);
  CHECK_THROWS_AS(make_initial_state({0.5, 1.1}), ParamOutOfRange);
}

TEST_CASE("DensityMatrix validation", "[states]") {
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::identity(2)), DimensionMismatch);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::identity(4)), ParamOutOfRange);  // trace 4

  ComplexMatrix skew = cplx{0.25} * ComplexMatrix::identity(4);
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(skew), ParamOutOfRange);

  const std::vector<double> neg{0.6, 0.5, 0.0, -0.1};
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::diagonal(std::span<const double>(neg))), PositivityViolation);
}
