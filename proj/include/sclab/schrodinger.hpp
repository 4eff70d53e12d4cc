#pragma once

#include <cstddef>
#include <vector>

#include "sclab/errors.hpp"
#include "sclab/grid.hpp"
#include "sclab/potential.hpp"

namespace sclab {

/// Wave function samples with the constants that enter its evolution.
class WaveFunction {
 public:
  /// hbar > 0 and mass > 0 (DomainError otherwise).
  WaveFunction(ComplexField psi, double hbar, double mass, double t = 0.0);

  const ComplexField& field() const { return psi_; }
  const Grid& grid() const { return psi_.grid(); }
  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double time() const { return t_; }

  /// dx * sum |psi_i|^2.
  double norm() const;
  /// Share of the total probability found in the outer `margin` of points
  /// on each side.
  double boundary_fraction(double margin = 0.05) const;
  /// Throws BoundaryLeak when boundary_fraction() exceeds `tolerance`.
  void check_leakage(double tolerance = 1e-10) const;

 private:
  ComplexField psi_;
  double hbar_;
  double mass_;
  double t_;
};

inline constexpr double kLeakTolerance = 1e-10;
inline constexpr double kNormTolerance = 1e-9;

/// psi(x,0) = (pi eps)^(-1/4) exp(-(x-r0)^2/(2 eps)) exp(i p0 x / hbar),
/// normalized on the grid. Throws DomainError for eps <= 0 and BoundaryLeak
/// when the packet does not fit.
WaveFunction init_gaussian(const Grid& grid, double epsilon, double r0, double p0, double hbar,
                           double mass);

/// Largest step for which each split phase rotates by less than half a radian
/// on every node. The kinetic bound is dropped for an identically zero
/// potential, where the kinetic factor is the exact propagator.
double max_stable_step(const Grid& grid, const PotentialSpec& V, double hbar);

/// Strang split-step propagator with precomputed phase factors.
class Propagator {
 public:
  /// Throws DomainError unless 0 < dt <= max_stable_step.
  Propagator(const Grid& grid, const PotentialSpec& V, double hbar, double dt);

  double dt() const { return dt_; }

  /// One step from time t: half potential kick, exact kinetic drift in
  /// Fourier space, half potential kick.
  void step(std::vector<complex>& psi, double t) const;

  /// n_steps steps with a leakage check after each, and a norm check at the
  /// end. On leakage a PropagationLeak carrying the last good state is thrown.
  WaveFunction advance(const WaveFunction& psi, std::size_t n_steps) const;

 private:
  std::vector<complex> potential_phase(double t) const;

  Grid grid_;
  PotentialSpec V_;
  double hbar_;
  double mass_;
  double dt_;
  std::vector<complex> kinetic_;
  std::vector<complex> static_half_kick_;
};

/// Leakage during propagation, with the state reached before the leak.
class PropagationLeak : public BoundaryLeak {
 public:
  PropagationLeak(const std::string& what, double fraction, WaveFunction partial)
      : BoundaryLeak(what, fraction), partial_(std::move(partial)) {}
  const WaveFunction& partial() const { return partial_; }

 private:
  WaveFunction partial_;
};

WaveFunction propagate(const WaveFunction& psi, const PotentialSpec& V, double dt,
                       std::size_t n_steps);

struct Observables {
  double x_mean = 0.0;
  double p_mean = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double uncertainty_product = 0.0;
  /// 2 * var_x, so that a density exp(-(x-r)^2/A) has width A.
  double width = 0.0;
  /// Fourth standardized moment of |psi|^2 minus 3.
  double kurtosis_excess = 0.0;
};

Observables observables(const WaveFunction& psi);

/// <T> + <V> at the wave function's time.
double energy(const WaveFunction& psi, const PotentialSpec& V);

/// Probability-weighted mean of the force field.
double mean_force(const WaveFunction& psi, const PotentialSpec& V);

// ---------------------------------------------------------------------------
// Closed-form Gaussian packets for the potentials of degree <= 2.

enum class PacketCase { Free, ConstantForce, Harmonic };

struct GaussianParams {
  PacketCase kind = PacketCase::Free;
  double epsilon0 = 1.0;  ///< initial width, density ~ exp(-(x-r)^2/epsilon)
  double r0 = 0.0;
  double p0 = 0.0;
  double hbar = 1.0;  ///< may be 0 for the classical limit
  double mass = 1.0;
  double omega = 1.0;  ///< Harmonic only
  double f0 = 0.0;     ///< ConstantForce only
};

struct GaussianPacketState {
  double epsilon_t = 0.0;
  double r_t = 0.0;
  double p_t = 0.0;
  double epsilon0 = 0.0;
  double hbar = 0.0;
  double mass = 0.0;
  double omega = 0.0;
};

/// Exact solution of the Schrodinger equation for a Gaussian packet that
/// starts with S(x,0) = p0 x. Density and action are
///   rho = (pi eps(t))^(-1/2) exp(-y^2/eps(t)),  y = x - r(t)
///   S   = (m/4)(eps'/eps) y^2 + p(t) y + p0 r0 + Lagrangian integral + phase
/// with the phase term -hbar/2 * atan(...) (unwrapped across branches).
class GaussianSolution {
 public:
  explicit GaussianSolution(GaussianParams params);

  const GaussianParams& params() const { return params_; }
  GaussianPacketState state(double t) const;
  double width(double t) const;
  double width_rate(double t) const;
  double width_acceleration(double t) const;
  double position(double t) const;
  double momentum(double t) const;

  double density(double x, double t) const;
  double action(double x, double t) const;
  /// dS/dt at fixed x.
  double action_rate(double x, double t) const;

  RealField density_field(const Grid& grid, double t) const;
  RealField action_field(const Grid& grid, double t) const;
  RealField action_rate_field(const Grid& grid, double t) const;
  WaveFunction wavefunction(const Grid& grid, double t) const;
  PotentialSpec potential() const;

 private:
  double curvature_coefficient(double t) const;
  double time_phase(double t) const;
  double time_phase_rate(double t) const;
  double lagrangian(double t) const;

  GaussianParams params_;
};

/// (epsilon(t), r(t), p(t)) for a packet with r0 = 0; `parameter` is omega
/// for Harmonic, F0 for ConstantForce and ignored for Free.
GaussianPacketState analytic_gaussian(PacketCase kind, double epsilon0, double p0, double hbar,
                                      double mass, double parameter, double t);

}  // namespace sclab
