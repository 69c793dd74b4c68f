#include "cqsl/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cqsl {

namespace {

ComplexMatrix from_elements(double r11, double r22, double r33, double r44, double r23) {
  ComplexMatrix m(4, 4);
  m(0, 0) = r11;
  m(1, 1) = r22;
  m(2, 2) = r33;
  m(3, 3) = r44;
  m(1, 2) = r23;
  m(2, 1) = r23;
  return m;
}

} // namespace

DensityMatrix analytic_state_dephasing(const DephasingParams& params, const InitialStateParams& initial, double mu,
                                       double t) {
  ChannelSpec{params, mu}.validate();
  const double r = initial.r;
  const double a2 = initial.alpha * initial.alpha;
  const double lambda = dephasing_kernel(t, params).lambda;
  const double coherence = initial.alpha * std::sqrt(1.0 - a2) * r * (mu + (1.0 - mu) * lambda * lambda);
  return DensityMatrix(from_elements((1.0 - r) / 4.0, (1.0 + (3.0 - 4.0 * a2) * r) / 4.0,
                                     (1.0 - (1.0 - 4.0 * a2) * r) / 4.0, (1.0 - r) / 4.0, coherence));
}

DensityMatrix analytic_state_ad(const ADParams& params, const InitialStateParams& initial, double mu, double t) {
  ChannelSpec{params, mu}.validate();
  const double r = initial.r;
  const double a2 = initial.alpha * initial.alpha;
  const double p = ad_probability(t, params);
  const double nu = 1.0 - mu;

  const double r11 = 0.25 * (1.0 - r) * (1.0 - p) * (1.0 - nu * p);
  const double r22 = 0.25 * (-4.0 * (1.0 - a2) * nu * r * p - nu * (1.0 - r) * p * p + (3.0 - 4.0 * a2) * r + 1.0);
  const double r33 = 0.25 * (-4.0 * a2 * nu * r * p - nu * (1.0 - r) * p * p - (1.0 - 4.0 * a2) * r + 1.0);
  const double r44 =
      0.25 * ((2.0 - 3.0 * mu) * r * p + nu * (1.0 - r) * p * p - mu * p + 2.0 * p - r + 1.0);
  const double r23 = initial.alpha * std::sqrt(1.0 - a2) * r * (1.0 - nu * p);
  return DensityMatrix(from_elements(r11, r22, r33, r44, r23));
}

std::vector<double> analytic_ad_singular_values(const ADParams& params, const InitialStateParams& initial, double mu,
                                                double t) {
  ChannelSpec{params, mu}.validate();
  const double r = initial.r;
  const double p = ad_probability(t, params);
  const double dp = ad_probability_rate(t, params);

  std::vector<double> sv{
      std::abs(0.5 * (mu - 1.0) * (r - 1.0) * p * dp),
      std::abs(0.5 * (mu - 1.0) * (r * p - p - 2.0 * r) * dp),
      std::abs(0.25 * (-mu + 2.0 * mu * r * p - 2.0 * r * p - 2.0 * mu * p + 2.0 * p - 3.0 * mu * r + 2.0 * r + 2.0) * dp),
      std::abs(0.25 * (mu + 2.0 * mu * r * p - 2.0 * r * p - 2.0 * mu * p + 2.0 * p - mu * r + 2.0 * r - 2.0) * dp)};
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

} // namespace cqsl
