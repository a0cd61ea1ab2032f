#include "spinpair/quantum.hpp"

#include <cmath>
#include <numbers>

#include "spinpair/errors.hpp"
#include "spinpair/parallel.hpp"

namespace spinpair {

namespace {

using Matrix2c = Eigen::Matrix<Complex, 2, 2>;

const Complex I{0.0, 1.0};

Matrix2c pauli_half(char axis) {
  Matrix2c s;
  switch (axis) {
    case 'x': s << 0.0, 0.5, 0.5, 0.0; break;
    case 'y': s << 0.0, -0.5 * I, 0.5 * I, 0.0; break;
    default: s << 0.5, 0.0, 0.0, -0.5; break;
  }
  return s;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

Matrix4c coupling_terms(const SpinPairParams& p) {
  using namespace ops;
  const Matrix4c xx = sx_a() * sx_b();
  const Matrix4c yy = sy_a() * sy_b();
  const Matrix4c zz = sz_a() * sz_b();
  return p.exchange * (xx + yy + zz) + p.dipolar * (2.0 * zz - xx - yy);
}

double hermitian_defect(const Matrix4c& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

namespace ops {
Matrix4c sx_a() { return kron(pauli_half('x'), Matrix2c::Identity()); }
Matrix4c sy_a() { return kron(pauli_half('y'), Matrix2c::Identity()); }
Matrix4c sz_a() { return kron(pauli_half('z'), Matrix2c::Identity()); }
Matrix4c sx_b() { return kron(Matrix2c::Identity(), pauli_half('x')); }
Matrix4c sy_b() { return kron(Matrix2c::Identity(), pauli_half('y')); }
Matrix4c sz_b() { return kron(Matrix2c::Identity(), pauli_half('z')); }
}  // namespace ops

void SpinPairParams::validate() const {
  if (!(g_a > 0.0) || !(g_b > 0.0)) throw InvalidInput("spin pair: g factors must be positive");
  if (!(b0 >= 0.0)) throw InvalidInput("spin pair: B0 must be non-negative");
  if (!std::isfinite(exchange) || !std::isfinite(dipolar))
    throw InvalidInput("spin pair: couplings must be finite");
}

void PulseSpec::validate() const {
  if (!(b1 >= 0.0)) throw InvalidInput("pulse: b1 must be non-negative");
  if (!(tau_ns >= 0.0)) throw InvalidInput("pulse: tau must be non-negative");
  if (!std::isfinite(carrier)) throw InvalidInput("pulse: carrier must be finite");
}

DensityMatrix::DensityMatrix(const Matrix4c& m) : m_(m) {
  if (hermitian_defect(m) > 1e-12) throw InvalidInput("density matrix is not Hermitian");
  if (std::abs(m.trace().real() - 1.0) > 1e-12) throw InvalidInput("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw InvalidInput("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::diagonal(const std::array<double, 4>& populations) {
  Matrix4c m = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) m(i, i) = populations[i];
  return DensityMatrix(m);
}

Matrix4c static_hamiltonian(const SpinPairParams& params) {
  params.validate();
  return params.larmor_a() * ops::sz_a() + params.larmor_b() * ops::sz_b() + coupling_terms(params);
}

Matrix4c static_eigenbasis(const SpinPairParams& params) {
  params.validate();
  // The secular Hamiltonian conserves total Sz, so only |ud>,|du> mix:
  // [[w/2, c], [c, -w/2]] with w = omega_Delta, c = (J - Dd)/2.
  const double half_sep = 0.5 * params.larmor_separation();
  const double c = 0.5 * (params.exchange - params.dipolar);
  double theta = 0.0;
  if (half_sep != 0.0) {
    theta = 0.5 * std::atan(c / half_sep);
  } else if (c != 0.0) {
    theta = std::copysign(0.25 * std::numbers::pi, c);
  }
  Matrix4c v = Matrix4c::Zero();
  v(0, 0) = 1.0;
  v(3, 3) = 1.0;
  v(1, 1) = std::cos(theta);
  v(2, 1) = std::sin(theta);
  v(1, 2) = -std::sin(theta);
  v(2, 2) = std::cos(theta);
  return v;
}

Matrix4c to_eigenbasis(const Matrix4c& op, const SpinPairParams& params) {
  const Matrix4c v = static_eigenbasis(params);
  return v.adjoint() * op * v;
}

Matrix4c rotating_frame_hamiltonian(const SpinPairParams& params, const PulseSpec& pulse) {
  params.validate();
  pulse.validate();
  // Rabi's-formula field b1 drives each spin with the co-rotating half b1/2.
  const double drive_a = 0.5 * larmor(params.g_a, pulse.b1);
  const double drive_b = 0.5 * larmor(params.g_b, pulse.b1);
  return (params.larmor_a() - pulse.carrier) * ops::sz_a() +
         (params.larmor_b() - pulse.carrier) * ops::sz_b() + drive_a * ops::sx_a() +
         drive_b * ops::sx_b() + coupling_terms(params);
}

DensityMatrix steady_state(const SteadyStateModel& model) {
  if (model.kind == SteadyStateModel::Kind::PureOuterTriplet)
    return DensityMatrix::diagonal({0.5, 0.0, 0.0, 0.5});
  double total = 0.0;
  for (double p : model.populations) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw InvalidInput("steady state: populations must be finite and non-negative");
    total += p;
  }
  if (total <= 0.0) throw InvalidInput("steady state: populations are all zero");
  std::array<double, 4> normalized{};
  for (int i = 0; i < 4; ++i) normalized[i] = model.populations[i] / total;
  return DensityMatrix::diagonal(normalized);
}

namespace {

struct Propagator {
  Eigen::Matrix<double, 4, 1> energies;
  Matrix4c vectors;

  explicit Propagator(const Matrix4c& h) {
    if (!h.allFinite() || hermitian_defect(h) > 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff()))
      throw InvalidInput("propagate: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success) throw InvalidInput("propagate: eigendecomposition failed");
    energies = es.eigenvalues();
    vectors = es.eigenvectors();
  }

  Matrix4c apply(const Matrix4c& rho, double tau_ns) const {
    const double t = ns_to_us(tau_ns);
    Vector4c phases;
    for (int i = 0; i < 4; ++i) phases(i) = std::exp(-I * energies(i) * t);
    const Matrix4c u = vectors * phases.asDiagonal() * vectors.adjoint();
    Matrix4c out = u * rho * u.adjoint();
    return 0.5 * (out + out.adjoint());
  }
};

}  // namespace

DensityMatrix propagate(const DensityMatrix& rho, const Matrix4c& hamiltonian, double tau_ns) {
  if (!(tau_ns >= 0.0)) throw InvalidInput("propagate: tau must be non-negative");
  const Propagator prop(hamiltonian);
  if (tau_ns == 0.0) return rho;
  return DensityMatrix(prop.apply(rho.matrix(), tau_ns));
}

double singlet_content(const DensityMatrix& rho, const SpinPairParams& params) {
  Vector4c singlet(0.0, 1.0, -1.0, 0.0);
  singlet /= std::sqrt(2.0);
  const Vector4c s = static_eigenbasis(params).adjoint() * singlet;
  return (s.adjoint() * rho.matrix() * s)(0, 0).real();
}

double delta_from_rho(const DensityMatrix& rho, const DensityMatrix& rho_s) {
  const double outer = rho.population(0) + rho.population(3);
  const double outer_s = rho_s.population(0) + rho_s.population(3);
  return -(outer - outer_s) / rho_s.trace();
}

double delta_from_rho_central(const DensityMatrix& rho, const DensityMatrix& rho_s,
                              const SpinPairParams& params, Branch branch) {
  const double sep = params.larmor_separation();
  const double coupling = params.exchange + params.dipolar;
  const double denom = branch == Branch::Plus ? sep + coupling : sep - coupling;
  if (denom == 0.0) throw DegenerateCoupling("omega_Delta +/- (J + Dd) vanishes");
  const double central = rho.population(1) + rho.population(2);
  const double central_s = rho_s.population(1) + rho_s.population(2);
  return (central - central_s) / rho_s.trace() * sep / denom;
}

TransientRecord rabi_transient_oracle(const SpinPairParams& params, double b1, double carrier,
                                      const std::vector<double>& tau_grid,
                                      const SteadyStateModel& model) {
  if (!strictly_increasing(tau_grid)) throw InvalidInput("oracle: tau grid must be increasing");
  if (!tau_grid.empty() && tau_grid.front() < 0.0)
    throw InvalidInput("oracle: tau must be non-negative");
  const PulseSpec pulse{b1, carrier, 0.0};
  const DensityMatrix rho_s = steady_state(model);
  TransientRecord rec;
  rec.tau_ns = tau_grid;
  rec.q.assign(tau_grid.size(), 0.0);
  rec.meta.b1_mT = b1;
  // Without drive the diagonal steady state is stationary.
  if (b1 == 0.0) {
    params.validate();
    pulse.validate();
    return rec;
  }
  const Propagator prop(to_eigenbasis(rotating_frame_hamiltonian(params, pulse), params));
  parallel_for(tau_grid.size(), [&](std::size_t k) {
    const DensityMatrix rho(prop.apply(rho_s.matrix(), tau_grid[k]));
    rec.q[k] = delta_from_rho(rho, rho_s);
  });
  return rec;
}

}  // namespace spinpair
