#pragma once

#include <vector>

#include "cqsl/channels.hpp"
#include "cqsl/states.hpp"

namespace cqsl {

// Closed-form two-qubit states for the initial-state family. They are an
// independent evaluation path: tests compare them against evolve().

/// Dephasing: populations are frozen and the |01><10| coherence carries the
/// factor mu + (1 - mu) Lambda(t)^2.
DensityMatrix analytic_state_dephasing(const DephasingParams& params, const InitialStateParams& initial, double mu,
                                       double t);

/// Amplitude damping, element by element in terms of p_t.
DensityMatrix analytic_state_ad(const ADParams& params, const InitialStateParams& initial, double mu, double t);

/// Singular values of d(rho_t)/dt for amplitude damping, descending.
std::vector<double> analytic_ad_singular_values(const ADParams& params, const InitialStateParams& initial, double mu,
                                                double t);

} // namespace cqsl
