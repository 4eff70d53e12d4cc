#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "sclab/potential.hpp"
#include "sclab/schrodinger.hpp"

namespace sclab {

struct PhasePoint {
  double r = 0.0;
  double p = 0.0;
};

/// One velocity-Verlet step from time t. A negative dt steps backward.
PhasePoint verlet_step(const PotentialSpec& V, PhasePoint z, double t, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> r;
  std::vector<double> p;
  std::vector<double> energy;

  std::size_t size() const { return times.size(); }
  double max_energy_drift() const;
};

/// Velocity-Verlet integration of Newton's equation, n_steps + 1 samples.
/// Throws EscapeError when |r| exceeds escape_bound.
Trajectory newton_integrate(const PotentialSpec& V, double r0, double p0, double dt,
                            std::size_t n_steps,
                            double escape_bound = std::numeric_limits<double>::infinity(),
                            double t0 = 0.0);

/// Nodes min + i * step for i in [0, n), step = (max - min) / (n - 1).
struct PhaseAxis {
  double min = 0.0;
  double max = 1.0;
  std::size_t n = 2;

  double step() const { return (max - min) / static_cast<double>(n - 1); }
  double at(std::size_t i) const { return min + static_cast<double>(i) * step(); }
};

/// Nonnegative density on a node grid in (x, p), stored row-major with p
/// varying fastest.
class PhaseDensity {
 public:
  PhaseDensity(PhaseAxis x, PhaseAxis p, std::vector<double> values);

  /// Product Gaussian exp(-(x-x0)^2/(2 sx^2) - (p-p0)^2/(2 sp^2)), normalized
  /// to unit discrete mass.
  static PhaseDensity gaussian(PhaseAxis x, PhaseAxis p, double x0, double p0, double sx,
                               double sp);

  const PhaseAxis& x_axis() const { return x_; }
  const PhaseAxis& p_axis() const { return p_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * p_.n + j]; }

  /// sum(values) * dx * dp.
  double mass() const;
  /// Bilinear interpolation, zero outside the node box.
  double sample(double x, double p) const;
  PhasePoint centroid() const;
  /// Marginal over x, one value per p node.
  std::vector<double> p_marginal() const;
  /// sum |a - b| dx dp on identical axes.
  double l1_distance(const PhaseDensity& other) const;

 private:
  PhaseAxis x_;
  PhaseAxis p_;
  std::vector<double> values_;
};

inline constexpr double kMassDriftTolerance = 1e-3;

/// Semi-Lagrangian Liouville update: every node is pulled back through the
/// Newton flow over [t0, t0 + t] in Verlet substeps of at most dt and the
/// initial density is sampled there. Throws MassDriftError when the mass
/// changes by more than kMassDriftTolerance (relative).
PhaseDensity liouville_evolve(const PhaseDensity& rho0, const PotentialSpec& V, double t,
                              double dt, double t0 = 0.0);

/// Box around a Gaussian blob that also covers its Newton flow up to t:
/// 6 sigma margins plus the envelope of trajectories launched from the blob.
std::pair<PhaseAxis, PhaseAxis> fit_phase_axes(const PotentialSpec& V, double x0, double p0,
                                               double sx, double sp, double t,
                                               std::size_t n = 256);

/// Test function phi(x, p) with its gradient, for the weak-form check.
struct TestFunction {
  const char* name;
  double (*value)(double x, double p);
  double (*dx)(double x, double p);
  double (*dp)(double x, double p);
};

/// x, p, x^2, x p, p^2.
const std::vector<TestFunction>& default_test_functions();

/// max over tests and interior samples of
///   | d/dt phi(r, p) - (p/m) dphi/dx - F(r, t) dphi/dp |
/// with the time derivative taken by centered differences of the series.
double delta_ansatz_residual(const Trajectory& traj, const PotentialSpec& V,
                             const std::vector<TestFunction>& tests = default_test_functions());

double delta_ansatz_check(const PotentialSpec& V, double r0, double p0, double t_final,
                          double dt = 1e-3);

struct ExpectationSample {
  double t = 0.0;
  double x_mean = 0.0;
  double p_mean = 0.0;
  double mean_force = 0.0;     ///< <F>
  double force_at_mean = 0.0;  ///< F(<x>)
};

ExpectationSample expectation_sample(const WaveFunction& psi, const PotentialSpec& V);

/// Expectations every `every` steps of a quantum run, n_samples in total.
std::vector<ExpectationSample> quantum_expectations(const WaveFunction& psi0,
                                                    const PotentialSpec& V, double dt,
                                                    std::size_t every, std::size_t n_samples);

struct EhrenfestResiduals {
  std::vector<double> residual1;  ///< d<x>/dt - <p>/m
  std::vector<double> residual2;  ///< d<p>/dt - <F>
  std::vector<double> force_gap;  ///< d<p>/dt - F(<x>)
};

/// Samples must be uniformly spaced in time (DomainError otherwise).
EhrenfestResiduals ehrenfest_residuals(const std::vector<ExpectationSample>& samples,
                                       double mass);

}  // namespace sclab
