#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "spinpair/constants.hpp"
#include "spinpair/records.hpp"

namespace spinpair {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;

// Hamiltonian inputs of a spin-1/2 pair. Couplings are angular (rad/us).
struct SpinPairParams {
  double g_a = 2.0;
  double g_b = 2.0;
  double exchange = 0.0;  // J
  double dipolar = 0.0;   // secular D^d
  double b0 = 0.0;        // mT

  double larmor_a() const { return larmor(g_a, b0); }
  double larmor_b() const { return larmor(g_b, b0); }
  // omega_Delta = omega_a - omega_b
  double larmor_separation() const { return larmor_a() - larmor_b(); }
  void validate() const;
};

struct PulseSpec {
  double b1 = 0.0;       // mT, field of Rabi's formula (rotating component is b1/2)
  double carrier = 0.0;  // rad/us
  double tau_ns = 0.0;
  void validate() const;
};

// Pair state in the eigenbasis of the static Hamiltonian: index 0 is the
// |up,up>-like state, 3 the |down,down>-like one, 1-2 the mixed central states.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(const Matrix4c& m);  // validates

  const Matrix4c& matrix() const { return m_; }
  double population(int i) const { return m_(i, i).real(); }
  double trace() const { return m_.trace().real(); }

  static DensityMatrix diagonal(const std::array<double, 4>& populations);

 private:
  Matrix4c m_ = Matrix4c::Zero();
};

struct SteadyStateModel {
  enum class Kind { PureOuterTriplet, Custom };
  Kind kind = Kind::PureOuterTriplet;
  std::array<double, 4> populations{};

  static SteadyStateModel pure_outer_triplet() { return {}; }
  static SteadyStateModel custom(const std::array<double, 4>& p) { return {Kind::Custom, p}; }
};

enum class Branch { Plus, Minus };

// Single-spin operators embedded in the pair product basis
// |uu>, |ud>, |du>, |dd> (first label = spin a).
namespace ops {
Matrix4c sx_a();
Matrix4c sy_a();
Matrix4c sz_a();
Matrix4c sx_b();
Matrix4c sy_b();
Matrix4c sz_b();
}  // namespace ops

// H = w_a Sz_a + w_b Sz_b + J S_a.S_b + Dd (2 Sz_a Sz_b - Sx_a Sx_b - Sy_a Sy_b),
// product basis, rad/us.
Matrix4c static_hamiltonian(const SpinPairParams& params);

// Columns are the static eigenvectors (product-basis components), ordered as in
// DensityMatrix.
Matrix4c static_eigenbasis(const SpinPairParams& params);

// Express a product-basis operator in the static eigenbasis.
Matrix4c to_eigenbasis(const Matrix4c& op, const SpinPairParams& params);

// Rotating-wave Hamiltonian in the carrier frame, product basis.
Matrix4c rotating_frame_hamiltonian(const SpinPairParams& params, const PulseSpec& pulse);

DensityMatrix steady_state(const SteadyStateModel& model = {});

// rho(tau) = U rho U^dagger, U = exp(-i H tau); H in the basis of rho.
DensityMatrix propagate(const DensityMatrix& rho, const Matrix4c& hamiltonian, double tau_ns);

// <S|rho|S> with |S> = (|ud> - |du>)/sqrt(2) mapped into the static eigenbasis.
double singlet_content(const DensityMatrix& rho, const SpinPairParams& params);

// Delta = -(rho_11 + rho_44 - rhoS_11 - rhoS_44) / Tr[rhoS].
double delta_from_rho(const DensityMatrix& rho, const DensityMatrix& rho_s);

// The same quantity through the central populations, scaled by
// omega_Delta / (omega_Delta +/- (J + Dd)); throws DegenerateCoupling when the denominator vanishes.
double delta_from_rho_central(const DensityMatrix& rho, const DensityMatrix& rho_s,
                              const SpinPairParams& params, Branch branch);

// Brute-force Delta(tau) from the exact 4-level dynamics.
TransientRecord rabi_transient_oracle(const SpinPairParams& params, double b1, double carrier,
                                      const std::vector<double>& tau_grid,
                                      const SteadyStateModel& model = {});

}  // namespace spinpair
