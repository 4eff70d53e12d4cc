#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sclab/errors.hpp"
#include "sclab/grid.hpp"
#include "sclab/potential.hpp"

namespace sclab {

struct FanOptions {
  std::size_t oversample = 4;  ///< characteristics per grid spacing
  double dt = 2.5e-3;          ///< integration step (shrunk to divide t_final)
  std::size_t snapshot_every = 40;
};

/// State of every characteristic at one snapshot time.
struct FanSnapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> S;
  std::vector<double> J;  ///< dx/dx0 by differences across the fan
};

/// Characteristics of the classical HJ equation, launched at x0_j with
/// p0 = dS0/dx and carrying S_j(t) = S0(x0_j) + integral of (p^2/2m - V).
struct CharacteristicFan {
  std::vector<double> x0;
  double spacing = 0.0;  ///< launch spacing
  double mass = 1.0;
  std::vector<FanSnapshot> snapshots;
  /// First time a Jacobian reached zero, interpolated between steps.
  std::optional<double> caustic_time;

  const FanSnapshot& at(double t) const;
};

/// Integrates the fan to t_final with a fourth-order symplectic scheme and
/// records snapshots. Runs through caustics; see caustic_time.
CharacteristicFan trace_characteristics(const RealField& S0, const PotentialSpec& V,
                                        double t_final, const FanOptions& options = {});

struct HjSolution {
  std::vector<double> times;
  std::vector<RealField> S;
  /// Nodes inside the span of the characteristics; S outside is a linear
  /// extrapolation.
  std::vector<std::vector<char>> covered;
  CharacteristicFan fan;
};

/// Raised by solve_hj at a caustic, carrying the pre-caustic snapshots.
class HjCausticError : public CausticError {
 public:
  HjCausticError(const std::string& what, double t_c, HjSolution partial)
      : CausticError(what, t_c), partial_(std::move(partial)) {}
  const HjSolution& partial() const { return partial_; }

 private:
  HjSolution partial_;
};

/// Solves S_t + S_x^2/(2m) + V = 0 from S0 by characteristics and rebuilds
/// S on the grid with cubic Hermite interpolation (values S_j, slopes p_j).
HjSolution solve_hj(const RealField& S0, const PotentialSpec& V, double t_final,
                    const FanOptions& options = {});

/// L2 norm over covered nodes of S_t + S_x^2/(2m) + V at snapshot k, with
/// S_t from a 5-snapshot difference stencil (3 when fewer exist).
double hj_solution_residual(const HjSolution& sol, std::size_t k, const PotentialSpec& V);

/// Density carried by the fan: rho(x_j(t)) |J_j(t)| = rho0(x0_j). The map
/// must be injective (|J| > 1e-6 with one sign) on the characteristics that
/// carry mass, else CausticError. t must be a snapshot time.
RealField transport_density(const RealField& rho0, const CharacteristicFan& fan, double t);

/// dS/dx (non-periodic stencil).
RealField momentum_field(const RealField& S);

/// The two terms of the continuity equation under the Gaussian ansatz,
/// integrated against rho_eps centred at r:
///   term1 = int rho_eps (x - r)(p - S_x),  term2 = (eps/2) int rho_eps S_xx.
/// term1_abs integrates |(x - r)(p - S_x)|, which does not cancel by symmetry.
struct ContinuityTerms {
  double term1 = 0.0;
  double term1_abs = 0.0;
  double term2 = 0.0;
};

ContinuityTerms deterministic_continuity_check(double epsilon, const RealField& S, double r,
                                               double p, std::size_t nodes = 40);

std::vector<ContinuityTerms> deterministic_continuity_check(double epsilon,
                                                            const std::vector<RealField>& S,
                                                            std::span<const double> r,
                                                            std::span<const double> p);

/// Newton's law projected onto the trajectory: at each interior snapshot,
///   a = d/dt S_x(r, t) at fixed r  +  (S_x / m) S_xx   (total derivative)
///   b = -dV/dx(r)
/// and the residual |a - b|. Snapshots must be uniform in time; r holds the
/// trajectory at the snapshot times. Returns one value per snapshot with
/// index in [2, n - 2).
struct NewtonProjection {
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> residual;
};

NewtonProjection projected_newton_check(const std::vector<double>& times,
                                        const std::vector<RealField>& S,
                                        std::span<const double> r, const PotentialSpec& V);

struct Expectations {
  double x_mean = 0.0;
  double p_mean = 0.0;
};

/// x_mean = int x rho, p_mean = int rho dS/dx. rho must integrate to 1.
Expectations expectations(const RealField& rho, const RealField& S);

}  // namespace sclab
