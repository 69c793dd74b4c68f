#include "cqsl/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cqsl/errors.hpp"

namespace cqsl::oracle {

namespace {

// J rho J^dagger - {J^dagger J, rho}/2
ComplexMatrix dissipator(const ComplexMatrix& j, const ComplexMatrix& rho) {
  const ComplexMatrix jd = j.adjoint();
  const ComplexMatrix jdj = jd * j;
  ComplexMatrix out = j * rho * jd;
  out -= cplx{0.5} * (jdj * rho + rho * jdj);
  return out;
}

ComplexMatrix embed_first(const ComplexMatrix& op) { return kron(op, pauli::identity()); }
ComplexMatrix embed_second(const ComplexMatrix& op) { return kron(pauli::identity(), op); }

double capped(double rate, std::atomic<std::size_t>& counter) {
  if (!std::isfinite(rate) || std::abs(rate) > kRateCap) {
    ++counter;
    return std::isnan(rate) ? kRateCap : std::copysign(kRateCap, rate);
  }
  return rate;
}

// gamma_t, capped near its poles.
std::function<double(double)> ad_capped_rate(const ADParams& params,
                                             std::shared_ptr<std::atomic<std::size_t>> counter) {
  return [params, counter](double t) {
    try {
      return capped(ad_rate(t, params), *counter);
    } catch (const PoleEncountered&) {
      ++*counter;
      return kRateCap;
    }
  };
}

std::function<double(double)> dephasing_capped_rate(const DephasingParams& params,
                                                    std::shared_ptr<std::atomic<std::size_t>> counter) {
  return [params, counter](double t) {
    const auto k = dephasing_kernel(t, params);
    if (k.lambda == 0.0) {
      ++*counter;
      return kRateCap;
    }
    return capped(-k.lambda_rate / (2.0 * k.lambda), *counter);
  };
}

// Squeezed thermal generator with lowering/raising operators lo, hi.
ComplexMatrix sgad_action(const SGADParams& p, const ComplexMatrix& lo, const ComplexMatrix& hi,
                          const ComplexMatrix& rho) {
  ComplexMatrix out = (p.omega * (p.n + 1.0)) * dissipator(lo, rho);
  out += (p.omega * p.n) * dissipator(hi, rho);
  out -= (p.omega * p.m) * (hi * rho * hi + lo * rho * lo);
  return out;
}

LindbladGenerator make(std::string name, std::size_t dim) {
  LindbladGenerator g;
  g.name = std::move(name);
  g.dim = dim;
  return g;
}

} // namespace

double SpectralReport::worst() const { return std::max({right_residual, left_residual, biorthogonality_residual}); }

LindbladGenerator zero_generator(std::size_t dim) {
  auto g = make("zero", dim);
  g.action = [dim](double, const ComplexMatrix&) { return ComplexMatrix(dim, dim); };
  return g;
}

LindbladGenerator ad_single_generator(const ADParams& params) {
  auto g = make("ad-single", 2);
  auto rate = ad_capped_rate(params, g.capped);
  g.action = [rate](double t, const ComplexMatrix& rho) { return rate(t) * dissipator(pauli::minus(), rho); };
  return g;
}

LindbladGenerator ad_uncorrelated_generator(const ADParams& params) {
  auto g = make("ad-uncorrelated", 4);
  auto rate = ad_capped_rate(params, g.capped);
  const auto j1 = embed_first(pauli::minus());
  const auto j2 = embed_second(pauli::minus());
  g.action = [rate, j1, j2](double t, const ComplexMatrix& rho) {
    return rate(t) * (dissipator(j1, rho) + dissipator(j2, rho));
  };
  return g;
}

LindbladGenerator ad_correlated_generator(const ADParams& params) {
  auto g = make("ad-correlated", 4);
  auto rate = ad_capped_rate(params, g.capped);
  const auto j = kron(pauli::minus(), pauli::minus());
  g.action = [rate, j](double t, const ComplexMatrix& rho) { return rate(t) * dissipator(j, rho); };
  return g;
}

LindbladGenerator sgad_single_generator(const SGADParams& params) {
  validate_params(params);
  auto g = make("sgad-single", 2);
  g.action = [params](double, const ComplexMatrix& rho) {
    return sgad_action(params, pauli::minus(), pauli::plus(), rho);
  };
  return g;
}

LindbladGenerator sgad_uncorrelated_generator(const SGADParams& params) {
  validate_params(params);
  auto g = make("sgad-uncorrelated", 4);
  const auto lo1 = embed_first(pauli::minus()), hi1 = embed_first(pauli::plus());
  const auto lo2 = embed_second(pauli::minus()), hi2 = embed_second(pauli::plus());
  g.action = [=](double, const ComplexMatrix& rho) {
    return sgad_action(params, lo1, hi1, rho) + sgad_action(params, lo2, hi2, rho);
  };
  return g;
}

LindbladGenerator sgad_correlated_generator(const SGADParams& params) {
  validate_params(params);
  auto g = make("sgad-correlated", 4);
  const auto lo = kron(pauli::minus(), pauli::minus());
  const auto hi = kron(pauli::plus(), pauli::plus());
  g.action = [=](double, const ComplexMatrix& rho) { return sgad_action(params, lo, hi, rho); };
  return g;
}

LindbladGenerator dephasing_single_generator(const DephasingParams& params) {
  auto g = make("dephasing-single", 2);
  auto kappa = dephasing_capped_rate(params, g.capped);
  const auto z = pauli::z();
  g.action = [kappa, z](double t, const ComplexMatrix& rho) { return kappa(t) * (z * rho * z - rho); };
  return g;
}

LindbladGenerator dephasing_uncorrelated_generator(const DephasingParams& params) {
  auto g = make("dephasing-uncorrelated", 4);
  auto kappa = dephasing_capped_rate(params, g.capped);
  const auto z1 = embed_first(pauli::z());
  const auto z2 = embed_second(pauli::z());
  g.action = [kappa, z1, z2](double t, const ComplexMatrix& rho) {
    return kappa(t) * (z1 * rho * z1 + z2 * rho * z2 - cplx{2.0} * rho);
  };
  return g;
}

LindbladGenerator dephasing_correlated_generator(const DephasingParams& params) {
  auto g = make("dephasing-correlated", 4);
  auto kappa = dephasing_capped_rate(params, g.capped);
  const auto zz = kron(pauli::z(), pauli::z());
  g.action = [kappa, zz](double t, const ComplexMatrix& rho) { return kappa(t) * (zz * rho * zz - rho); };
  return g;
}

LindbladGenerator uncorrelated_generator(const FamilyParams& params) {
  struct Visitor {
    LindbladGenerator operator()(const DephasingParams& p) const { return dephasing_uncorrelated_generator(p); }
    LindbladGenerator operator()(const ADParams& p) const { return ad_uncorrelated_generator(p); }
    LindbladGenerator operator()(const SGADParams& p) const { return sgad_uncorrelated_generator(p); }
  };
  return std::visit(Visitor{}, params);
}

LindbladGenerator correlated_generator(const FamilyParams& params) {
  struct Visitor {
    LindbladGenerator operator()(const DephasingParams& p) const { return dephasing_correlated_generator(p); }
    LindbladGenerator operator()(const ADParams& p) const { return ad_correlated_generator(p); }
    LindbladGenerator operator()(const SGADParams& p) const { return sgad_correlated_generator(p); }
  };
  return std::visit(Visitor{}, params);
}

// ---------------------------------------------------------------------------

namespace {

ComplexMatrix integrate(const LindbladGenerator& gen, ComplexMatrix rho, double t_final, std::size_t steps) {
  const double h = t_final / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = h * static_cast<double>(k);
    const ComplexMatrix k1 = gen(t, rho);
    const ComplexMatrix k2 = gen(t + h / 2, rho + cplx{h / 2} * k1);
    const ComplexMatrix k3 = gen(t + h / 2, rho + cplx{h / 2} * k2);
    const ComplexMatrix k4 = gen(t + h, rho + cplx{h} * k3);
    rho += cplx{h / 6} * (k1 + cplx{2.0} * k2 + cplx{2.0} * k3 + k4);
  }
  return rho;
}

} // namespace

RK4Result rk4_evolve(const LindbladGenerator& gen, const ComplexMatrix& rho0, double t_final,
                     const RK4Options& options) {
  if (!(options.dt > 0.0)) throw ParamOutOfRange(fmt::format("dt must be > 0, got {}", options.dt));
  if (!(t_final >= 0.0)) throw ParamOutOfRange(fmt::format("t_final must be >= 0, got {}", t_final));
  if (rho0.rows() != gen.dim || rho0.cols() != gen.dim)
    throw DimensionMismatch(fmt::format("{} acts on {}x{} matrices", gen.name, gen.dim, gen.dim));

  RK4Result res;
  const std::size_t before = gen.capped->load();
  res.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t_final / options.dt - 1e-9)));
  if (t_final == 0.0) {
    res.rho = rho0;
    return res;
  }
  ComplexMatrix rho = integrate(gen, rho0, t_final, res.steps);

  if (options.halving_check) {
    const ComplexMatrix finer = integrate(gen, rho0, t_final, 2 * res.steps);
    res.halving_diff = max_abs_diff(rho, finer);
    if (res.halving_diff > options.halving_tol) {
      throw StepTooLarge(fmt::format("{}: halving dt changes the result by {:.3e} at t = {}", gen.name,
                                     res.halving_diff, t_final));
    }
  }

  const double drift = std::max(hermiticity_defect(rho), std::abs(rho.trace() - rho0.trace()));
  if (drift > options.drift_tol) {
    throw StepTooLarge(fmt::format("{}: trace/hermiticity drift {:.3e} at t = {}", gen.name, drift, t_final));
  }
  rho = hermitian_part(rho);
  const cplx tr = rho.trace();
  if (std::abs(tr) > 0.0) rho *= rho0.trace() / tr;
  res.rho = std::move(rho);
  res.capped_evaluations = gen.capped->load() - before;
  return res;
}

ComplexMatrix rk4_mixture(const FamilyParams& params, double mu, const ComplexMatrix& rho0, double t_final,
                          const RK4Options& options) {
  ChannelSpec{params, mu}.validate();
  ComplexMatrix un = rk4_evolve(uncorrelated_generator(params), rho0, t_final, options).rho;
  const ComplexMatrix co = rk4_evolve(correlated_generator(params), rho0, t_final, options).rho;
  un *= (1.0 - mu);
  un += cplx{mu} * co;
  return un;
}

// ---------------------------------------------------------------------------

SpectralReport spectral_check(const SGADParams& params) {
  validate_params(params);
  const auto gen = sgad_single_generator(params);
  const double n = params.n, m = params.m, w = params.omega;
  const double k = 1.0 / std::sqrt(2.0);
  const auto id = pauli::identity();
  const auto z = pauli::z();
  const auto sp = pauli::plus();
  const auto sm = pauli::minus();

  const std::array<ComplexMatrix, 4> right{
      k * (id - (1.0 / (2.0 * n + 1.0)) * z),
      k * (sp + sm),
      k * (sm - sp),
      k * z,
  };
  const std::array<ComplexMatrix, 4> left{
      k * id,
      k * (sp + sm),
      -k * (sm - sp),
      k * ((1.0 / (2.0 * n + 1.0)) * id + z),
  };

  SpectralReport rep;
  rep.eta = {0.0, -w * (n + m + 0.5), -w * (n - m + 0.5), -2.0 * w * (n + 0.5)};

  for (std::size_t i = 0; i < 4; ++i) {
    const cplx eta{rep.eta[i]};
    rep.right_residual = std::max(rep.right_residual, max_abs_diff(gen(0.0, right[i]), eta * right[i]));
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        const auto x = ComplexMatrix::unit(2, a, b);
        const cplx lhs = trace_product(left[i], gen(0.0, x));
        const cplx rhs = eta * trace_product(left[i], x);
        rep.left_residual = std::max(rep.left_residual, std::abs(lhs - rhs));
      }
    }
    for (std::size_t j = 0; j < 4; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      rep.biorthogonality_residual =
          std::max(rep.biorthogonality_residual, std::abs(trace_product(left[i], right[j]) - delta));
    }
  }
  return rep;
}

ComplexMatrix fd_derivative(const std::function<ComplexMatrix(double)>& state_fn, double t, double h) {
  if (!(h > 0.0)) throw ParamOutOfRange(fmt::format("fd step must be > 0, got {}", h));
  ComplexMatrix d = state_fn(t + h) - state_fn(t - h);
  d *= 1.0 / (2.0 * h);
  return hermitian_part(d);
}

} // namespace cqsl::oracle
