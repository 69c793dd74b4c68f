#include "cqsl/channels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "cqsl/errors.hpp"

namespace cqsl {

namespace {

constexpr double kClampTol = 1e-9;

// sinh(z)/z and sin(z)/z, continuous through z = 0.
cplx sinhc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

cplx sinc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

// Clamp x into [lo, hi] when it is outside by float noise only.
double clamp_checked(double x, double lo, double hi, const char* what) {
  if (x < lo - kClampTol || x > hi + kClampTol) {
    throw ParamOutOfRange(fmt::format("{} = {:.12g} outside [{}, {}]", what, x, lo, hi));
  }
  return std::clamp(x, lo, hi);
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParamOutOfRange(fmt::format("time must be >= 0, got {}", t));
}

ComplexMatrix sandwich_self(const ComplexMatrix& k) { return kron(k.conjugate(), k); }

// d/dt of X -> K X K^dagger given dK/dt.
ComplexMatrix sandwich_rate(const ComplexMatrix& k, const ComplexMatrix& k_rate) {
  return kron(k_rate.conjugate(), k) + kron(k.conjugate(), k_rate);
}

std::size_t vec_index(std::size_t i, std::size_t j, std::size_t dim) { return j * dim + i; }

// Coefficients of the generalized-amplitude-damping action inside a
// two-level block. For the map value these are (p^2, pq, pr, 1); for its
// time derivative they are the derivatives of the same products.
struct GadCoefficients {
  double p2 = 1.0;
  double pq = 1.0;
  double pr = 0.0;
  double constant = 1.0;
};

// Writes the block action for levels (hi = excited, lo = ground) of a
// dim-dimensional system into superoperator s.
void write_gad_block(ComplexMatrix& s, std::size_t dim, std::size_t hi, std::size_t lo, double n,
                     const GadCoefficients& c) {
  const double norm = 2.0 * n + 1.0;
  const auto hh = vec_index(hi, hi, dim);
  const auto ll = vec_index(lo, lo, dim);
  const auto hl = vec_index(hi, lo, dim);
  const auto lh = vec_index(lo, hi, dim);

  // rho_hh' = [n (rho_hh + rho_ll) + p^2 ((n+1) rho_hh - n rho_ll)] / (2n+1)
  const double from_hh = (c.constant * n + c.p2 * (n + 1.0)) / norm;
  const double from_ll = (c.constant * n - c.p2 * n) / norm;
  s(hh, hh) = from_hh;
  s(hh, ll) = from_ll;
  // rho_ll' = (rho_hh + rho_ll) - rho_hh'
  s(ll, hh) = c.constant - from_hh;
  s(ll, ll) = c.constant - from_ll;
  // rho_hl' = pq rho_hl - pr rho_lh, and the conjugate element.
  s(hl, hl) = c.pq;
  s(hl, lh) = -c.pr;
  s(lh, lh) = c.pq;
  s(lh, hl) = -c.pr;
}

GadCoefficients sgad_value_coefficients(const SGADScalars& v) {
  return {v.p * v.p, v.p * v.q, v.p * v.r, 1.0};
}

GadCoefficients sgad_rate_coefficients(const SGADScalars& v, const SGADScalars& d) {
  return {2.0 * v.p * d.p, d.p * v.q + v.p * d.q, d.p * v.r + v.p * d.r, 0.0};
}

ComplexMatrix sgad_single_superop(const SGADParams& params, const GadCoefficients& c) {
  ComplexMatrix s(4, 4);
  write_gad_block(s, 2, 0, 1, params.n, c);
  return s;
}

// Exact solution of the correlated two-qubit SGAD generator, in which
// sigma_+/- act jointly on both qubits. |00> and |11> form an effective
// two-level system; coherences to |01>, |10> decay at half the respective
// population rates; the {|01>, |10>} block is untouched.
ComplexMatrix sgad_correlated_superop(const SGADParams& params, const GadCoefficients& c, double sqrt_s,
                                      double sqrt_u) {
  constexpr std::size_t dim = 4;
  ComplexMatrix s(16, 16);
  write_gad_block(s, dim, 0, 3, params.n, c);
  for (std::size_t j : {1u, 2u}) {
    s(vec_index(0, j, dim), vec_index(0, j, dim)) = sqrt_s;
    s(vec_index(j, 0, dim), vec_index(j, 0, dim)) = sqrt_s;
    s(vec_index(j, 3, dim), vec_index(j, 3, dim)) = sqrt_u;
    s(vec_index(3, j, dim), vec_index(3, j, dim)) = sqrt_u;
    for (std::size_t k : {1u, 2u}) s(vec_index(j, k, dim), vec_index(j, k, dim)) = c.constant;
  }
  return s;
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Dephasing superoperators are fixed combinations of these; build them once.
struct DephasingSandwiches {
  ComplexMatrix id1, z1, id2, zz;
};

const DephasingSandwiches& dephasing_sandwiches() {
  static const DephasingSandwiches s{sandwich_self(pauli::identity()), sandwich_self(pauli::z()),
                                     sandwich_self(ComplexMatrix::identity(4)),
                                     sandwich_self(kron(pauli::z(), pauli::z()))};
  return s;
}

ComplexMatrix weighted(double a, const ComplexMatrix& x, double b, const ComplexMatrix& y) {
  ComplexMatrix out = x;
  out *= a;
  out += cplx{b} * y;
  return out;
}

} // namespace

std::string_view to_string(ChannelFamily family) {
  switch (family) {
    case ChannelFamily::DephasingColored: return "dephasing";
    case ChannelFamily::AmplitudeDamping: return "ad";
    case ChannelFamily::SGAD: return "sgad";
  }
  return "unknown";
}

cplx DephasingParams::w() const { return std::sqrt(cplx{16.0 * nu * nu - 1.0, 0.0}); }

cplx ADParams::d() const { return std::sqrt(cplx{lambda * lambda - 2.0 * gamma0 * lambda, 0.0}); }

ChannelFamily family_of(const FamilyParams& params) {
  struct Visitor {
    ChannelFamily operator()(const DephasingParams&) const { return ChannelFamily::DephasingColored; }
    ChannelFamily operator()(const ADParams&) const { return ChannelFamily::AmplitudeDamping; }
    ChannelFamily operator()(const SGADParams&) const { return ChannelFamily::SGAD; }
  };
  return std::visit(Visitor{}, params);
}

void validate_params(const FamilyParams& params) {
  struct Visitor {
    void operator()(const DephasingParams& p) const {
      if (!(p.nu > 0.0) || !std::isfinite(p.nu)) throw ParamOutOfRange(fmt::format("nu must be > 0, got {}", p.nu));
    }
    void operator()(const ADParams& p) const {
      if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        throw ParamOutOfRange(fmt::format("lambda must be > 0, got {}", p.lambda));
      if (!(p.gamma0 > 0.0) || !std::isfinite(p.gamma0))
        throw ParamOutOfRange(fmt::format("gamma0 must be > 0, got {}", p.gamma0));
    }
    void operator()(const SGADParams& p) const {
      if (!(p.n >= 0.0) || !std::isfinite(p.n)) throw ParamOutOfRange(fmt::format("n must be >= 0, got {}", p.n));
      if (!(p.m >= 0.0) || !std::isfinite(p.m)) throw ParamOutOfRange(fmt::format("m must be >= 0, got {}", p.m));
      if (!(p.m < p.n + 0.5)) throw ParamOutOfRange(fmt::format("need m < n + 1/2, got m={} n={}", p.m, p.n));
      if (!(p.omega > 0.0) || !std::isfinite(p.omega))
        throw ParamOutOfRange(fmt::format("omega must be > 0, got {}", p.omega));
    }
  };
  std::visit(Visitor{}, params);
}

void ChannelSpec::validate() const {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ParamOutOfRange(fmt::format("mu must lie in [0,1], got {}", mu));
  validate_params(params);
}

// ---------------------------------------------------------------------------

DephasingKernel dephasing_kernel(double t, const DephasingParams& params) {
  require_time(t);
  const double nu = params.nu;
  const double x = t / (2.0 * nu);
  const cplx w = params.w();
  const double envelope = std::exp(-x);
  // Lambda = e^{-x}[cos(wx) + sin(wx)/w]; dLambda/dt = -8 nu e^{-x} x sinc(wx).
  const cplx lambda = envelope * (std::cos(w * x) + x * sinc(w * x));
  const cplx rate = -8.0 * nu * envelope * x * sinc(w * x);

  DephasingKernel k;
  k.lambda = clamp_checked(lambda.real(), -1.0, 1.0, "Lambda(t)");
  k.lambda_rate = rate.real();
  k.z = clamp_checked((1.0 - k.lambda) / 2.0, 0.0, 1.0, "z_t");
  k.z_rate = -k.lambda_rate / 2.0;
  return k;
}

ADAmplitude ad_amplitude(double t, const ADParams& params) {
  require_time(t);
  const cplx d = params.d();
  const double lambda = params.lambda;
  const double envelope = std::exp(-lambda * t / 2.0);
  const cplx half = d * t / 2.0;
  const cplx g = std::cosh(half) + (lambda * t / 2.0) * sinhc(half);
  const cplx g_rate = -(params.gamma0 * lambda * t / 2.0) * sinhc(half);
  return {(envelope * g).real(), (envelope * g_rate).real()};
}

double ad_probability(double t, const ADParams& params) {
  const double a = ad_amplitude(t, params).amplitude;
  return clamp_checked(1.0 - a * a, 0.0, 1.0, "p_t");
}

double ad_probability_rate(double t, const ADParams& params) {
  const auto amp = ad_amplitude(t, params);
  return -2.0 * amp.amplitude * amp.amplitude_rate;
}

double ad_rate(double t, const ADParams& params) {
  require_time(t);
  const cplx d = params.d();
  const cplx half = d * t / 2.0;
  // gamma_t = 2 gamma0 lambda sinh(dt/2) / (d cosh(dt/2) + lambda sinh(dt/2)), divided through by d.
  const cplx denominator = std::cosh(half) + (params.lambda * t / 2.0) * sinhc(half);
  if (std::abs(denominator) < 1e-12) {
    throw PoleEncountered(fmt::format("gamma_t diverges at t = {}", t));
  }
  return (params.gamma0 * params.lambda * t * sinhc(half) / denominator).real();
}

SGADScalars sgad_scalars(double t, const SGADParams& params) {
  require_time(t);
  const double w = params.omega;
  return {std::exp(-w * (params.n + 0.5) * t), std::cosh(w * params.m * t), std::sinh(w * params.m * t),
          std::exp(-w * params.n * t), std::exp(-w * (params.n + 1.0) * t)};
}

SGADScalars sgad_scalar_rates(double t, const SGADParams& params) {
  const auto v = sgad_scalars(t, params);
  const double w = params.omega;
  return {-w * (params.n + 0.5) * v.p, w * params.m * v.r, w * params.m * v.q, -w * params.n * v.u,
          -w * (params.n + 1.0) * v.s};
}

// ---------------------------------------------------------------------------

double KrausSet::defect() const {
  if (operators.empty()) throw DimensionMismatch("empty Kraus set");
  const std::size_t n = operators.front().rows();
  ComplexMatrix sum(n, n);
  for (const auto& e : operators) sum += e.adjoint() * e;
  return (sum - ComplexMatrix::identity(n)).frobenius_norm();
}

double kraus_defect(const KrausSet& ks) { return ks.defect(); }

KrausSet dephasing_single_kraus(double t, const DephasingParams& params) {
  const auto k = dephasing_kernel(t, params);
  return {{std::sqrt(1.0 - k.z) * pauli::identity(), std::sqrt(k.z) * pauli::z()}};
}

KrausSet dephasing_uncorrelated_kraus(double t, const DephasingParams& params) {
  const auto k = dephasing_kernel(t, params);
  const std::array<double, 2> prob{1.0 - k.z, k.z};
  const std::array<ComplexMatrix, 2> ops{pauli::identity(), pauli::z()};
  KrausSet ks;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) ks.operators.push_back(std::sqrt(prob[i] * prob[j]) * kron(ops[i], ops[j]));
  return ks;
}

KrausSet dephasing_correlated_kraus(double t, const DephasingParams& params) {
  const auto k = dephasing_kernel(t, params);
  return {{std::sqrt(1.0 - k.z) * kron(pauli::identity(), pauli::identity()),
           std::sqrt(k.z) * kron(pauli::z(), pauli::z())}};
}

KrausSet ad_single_kraus(double t, const ADParams& params) {
  const double p = ad_probability(t, params);
  ComplexMatrix a0{{std::sqrt(1.0 - p), 0.0}, {0.0, 1.0}};
  ComplexMatrix a1{{0.0, 0.0}, {std::sqrt(p), 0.0}};
  return {{std::move(a0), std::move(a1)}};
}

KrausSet ad_uncorrelated_kraus(double t, const ADParams& params) {
  const auto single = ad_single_kraus(t, params);
  KrausSet ks;
  for (const auto& a : single.operators)
    for (const auto& b : single.operators) ks.operators.push_back(kron(a, b));
  return ks;
}

KrausSet ad_correlated_kraus(double t, const ADParams& params) {
  const double p = ad_probability(t, params);
  const std::array<double, 4> diag{std::sqrt(1.0 - p), 1.0, 1.0, 1.0};
  ComplexMatrix a11(4, 4);
  a11(3, 0) = std::sqrt(p);
  return {{ComplexMatrix::diagonal(std::span<const double>(diag)), std::move(a11)}};
}

namespace {
cplx root(double radicand) { return std::sqrt(cplx{radicand, 0.0}); }
} // namespace

KrausSet sgad_single_kraus_published(double t, const SGADParams& params) {
  const auto v = sgad_scalars(t, params);
  const double n = params.n;
  const double hot = n / (2.0 * n + 1.0);
  const double cold = (n + 1.0) / (2.0 * n + 1.0);
  const double p2 = v.p * v.p;

  KrausSet ks;
  ComplexMatrix a1(2, 2), a2(2, 2), a3(2, 2), a6(2, 2);
  a1(0, 0) = root(hot + cold * p2 - v.p * v.q);
  a2(1, 0) = root(cold * (1.0 - p2) - v.p * v.r);
  a3(1, 1) = root(cold + hot * p2 - v.p * v.r);
  a6(0, 1) = root(hot * (1.0 - p2) - v.p * v.r);
  ks.operators = {a1, a2, a3, root(v.p * v.q) * pauli::identity(), root(v.p * v.r) * pauli::x(), a6};
  return ks;
}

KrausSet sgad_correlated_kraus_published(double t, const SGADParams& params) {
  const auto v = sgad_scalars(t, params);
  const double n = params.n;
  const double hot = n / (2.0 * n + 1.0);
  const double cold = (n + 1.0) / (2.0 * n + 1.0);
  const double p2 = v.p * v.p;

  std::array<ComplexMatrix, 7> e;
  for (auto& m : e) m = ComplexMatrix(4, 4);
  e[0](0, 0) = std::sqrt(v.s);
  e[0](1, 1) = 1.0;
  e[0](2, 2) = 1.0;
  e[0](3, 3) = std::sqrt(v.u);
  e[1](3, 0) = root(cold * (1.0 - p2) - v.p * v.r);
  e[2](0, 3) = root(hot * (1.0 - p2) - v.p * v.r);
  e[3](0, 0) = root(hot + cold * p2 - v.p * (v.q - 1.0) - v.s);
  e[4](3, 3) = root(cold + hot * p2 - v.p * (v.q - 1.0) - v.u);
  // Printed radicand "p_t(q_t) - 1", read literally.
  e[5](0, 0) = root(v.p * v.q - 1.0);
  e[5](3, 3) = root(v.p * v.q - 1.0);
  e[6](0, 3) = cplx{0.0, 1.0} * std::sqrt(v.p * v.r);
  e[6](3, 0) = cplx{0.0, 1.0} * std::sqrt(v.p * v.r);
  return {{e.begin(), e.end()}};
}

// ---------------------------------------------------------------------------

ComplexMatrix single_qubit_map(const FamilyParams& params, double t) {
  struct Visitor {
    double t;
    ComplexMatrix operator()(const DephasingParams& p) const {
      const auto k = dephasing_kernel(t, p);
      const auto& s = dephasing_sandwiches();
      return weighted(1.0 - k.z, s.id1, k.z, s.z1);
    }
    ComplexMatrix operator()(const ADParams& p) const { return superop_from_kraus(ad_single_kraus(t, p).operators); }
    ComplexMatrix operator()(const SGADParams& p) const {
      return sgad_single_superop(p, sgad_value_coefficients(sgad_scalars(t, p)));
    }
  };
  return std::visit(Visitor{t}, params);
}

ComplexMatrix single_qubit_map_rate(const FamilyParams& params, double t) {
  struct Visitor {
    double t;
    ComplexMatrix operator()(const DephasingParams& p) const {
      const auto k = dephasing_kernel(t, p);
      const auto& s = dephasing_sandwiches();
      return weighted(-k.z_rate, s.id1, k.z_rate, s.z1);
    }
    ComplexMatrix operator()(const ADParams& p) const {
      const auto amp = ad_amplitude(t, p);
      const double prob = ad_probability(t, p);
      const double prob_rate = -2.0 * amp.amplitude * amp.amplitude_rate;
      const ComplexMatrix a0{{std::sqrt(1.0 - prob), 0.0}, {0.0, 1.0}};
      // d sqrt(1-p)/dt = d|a|/dt
      const ComplexMatrix a0_rate{{sign_of(amp.amplitude) * amp.amplitude_rate, 0.0}, {0.0, 0.0}};
      return sandwich_rate(a0, a0_rate) + prob_rate * sandwich_self(pauli::minus());
    }
    ComplexMatrix operator()(const SGADParams& p) const {
      return sgad_single_superop(p, sgad_rate_coefficients(sgad_scalars(t, p), sgad_scalar_rates(t, p)));
    }
  };
  return std::visit(Visitor{t}, params);
}

TwoQubitMap uncorrelated_two_qubit_map(const FamilyParams& params, double t) {
  const auto single = single_qubit_map(params, t);
  return {tensor_of_maps(single, 2, single, 2), t};
}

ComplexMatrix uncorrelated_two_qubit_map_rate(const FamilyParams& params, double t) {
  const auto single = single_qubit_map(params, t);
  const auto rate = single_qubit_map_rate(params, t);
  return tensor_of_maps(rate, 2, single, 2) + tensor_of_maps(single, 2, rate, 2);
}

TwoQubitMap correlated_two_qubit_map(const FamilyParams& params, double t) {
  struct Visitor {
    double t;
    ComplexMatrix operator()(const DephasingParams& p) const {
      const auto k = dephasing_kernel(t, p);
      const auto& s = dephasing_sandwiches();
      return weighted(1.0 - k.z, s.id2, k.z, s.zz);
    }
    ComplexMatrix operator()(const ADParams& p) const {
      return superop_from_kraus(ad_correlated_kraus(t, p).operators);
    }
    ComplexMatrix operator()(const SGADParams& p) const {
      const auto v = sgad_scalars(t, p);
      return sgad_correlated_superop(p, sgad_value_coefficients(v), std::sqrt(v.s), std::sqrt(v.u));
    }
  };
  return {std::visit(Visitor{t}, params), t};
}

ComplexMatrix correlated_two_qubit_map_rate(const FamilyParams& params, double t) {
  struct Visitor {
    double t;
    ComplexMatrix operator()(const DephasingParams& p) const {
      const auto k = dephasing_kernel(t, p);
      const auto& s = dephasing_sandwiches();
      return weighted(-k.z_rate, s.id2, k.z_rate, s.zz);
    }
    ComplexMatrix operator()(const ADParams& p) const {
      const auto amp = ad_amplitude(t, p);
      const double prob = ad_probability(t, p);
      const double prob_rate = -2.0 * amp.amplitude * amp.amplitude_rate;
      const std::array<double, 4> diag{std::sqrt(1.0 - prob), 1.0, 1.0, 1.0};
      const auto a00 = ComplexMatrix::diagonal(std::span<const double>(diag));
      ComplexMatrix a00_rate(4, 4);
      a00_rate(0, 0) = sign_of(amp.amplitude) * amp.amplitude_rate;
      return sandwich_rate(a00, a00_rate) + prob_rate * sandwich_self(ComplexMatrix::unit(4, 3, 0));
    }
    ComplexMatrix operator()(const SGADParams& p) const {
      const auto v = sgad_scalars(t, p);
      const auto d = sgad_scalar_rates(t, p);
      const double sqrt_s = std::sqrt(v.s);
      const double sqrt_u = std::sqrt(v.u);
      return sgad_correlated_superop(p, sgad_rate_coefficients(v, d), d.s / (2.0 * sqrt_s), d.u / (2.0 * sqrt_u));
    }
  };
  return std::visit(Visitor{t}, params);
}

TwoQubitMap combined_map(const ChannelSpec& spec, double t) {
  spec.validate();
  auto un = uncorrelated_two_qubit_map(spec.params, t).superop;
  const auto co = correlated_two_qubit_map(spec.params, t).superop;
  un *= (1.0 - spec.mu);
  un += cplx{spec.mu} * co;
  return {std::move(un), t};
}

ComplexMatrix combined_map_rate(const ChannelSpec& spec, double t) {
  spec.validate();
  auto un = uncorrelated_two_qubit_map_rate(spec.params, t);
  un *= (1.0 - spec.mu);
  un += cplx{spec.mu} * correlated_two_qubit_map_rate(spec.params, t);
  return un;
}

DensityMatrix evolve(const DensityMatrix& rho0, const ChannelSpec& spec, double t) {
  ComplexMatrix out = hermitian_part(combined_map(spec, t).apply(rho0.matrix()));
  const auto eig = hermitian_eig(out);
  const double min_eig = eig.eigenvalues.back();
  if (min_eig < kPositivityTol) {
    throw PositivityViolation(
        fmt::format("evolved state has eigenvalue {:.3e} ({} at t = {})", min_eig, to_string(spec.family()), t));
  }
  if (min_eig < DensityMatrix::kPsdTol) {
    // Float-level negativity: clip and renormalize.
    std::vector<double> clipped = eig.eigenvalues;
    double total = 0.0;
    for (auto& x : clipped) total += (x = std::max(x, 0.0));
    const auto& v = eig.eigenvectors;
    out = v * ComplexMatrix::diagonal(std::span<const double>(clipped)) * v.adjoint();
    out *= 1.0 / total;
  }
  return DensityMatrix(std::move(out));
}

ComplexMatrix sgad_correlated_published(const ComplexMatrix& rho, double t, const SGADParams& params) {
  const auto v = sgad_scalars(t, params);
  const double n = params.n;
  const double norm = 2.0 * n + 1.0;
  ComplexMatrix out = rho;
  out(0, 0) = (((n + 1.0) * v.p * v.p - norm * v.s * (1.0 - v.u) + n) * rho(0, 0) +
               (n - v.p * (n * v.p + 2.0 * norm * v.r)) * rho(3, 3)) /
              norm;
  const double su = std::sqrt(v.s * v.u);
  out(0, 1) = su * rho(0, 1);
  out(0, 2) = su * rho(0, 2);
  out(0, 3) = (std::sqrt(v.s) * v.u - v.p * (1.0 - v.q)) * rho(0, 3) - v.p * v.r * rho(3, 0);
  out(1, 3) = std::sqrt(v.u) * rho(1, 3);
  out(2, 3) = std::sqrt(v.u) * rho(2, 3);
  out(3, 3) = 1.0 - out(0, 0) - rho(1, 1) - rho(2, 2);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = std::conj(out(j, i));
  return out;
}

} // namespace cqsl
