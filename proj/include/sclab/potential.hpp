#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sclab/grid.hpp"

namespace sclab {

/// Coefficients c_0..c_d of V(x) = sum c_i x^i, active from t_begin on.
struct PolynomialSegment {
  double t_begin = 0.0;
  std::vector<double> coeffs;
};

namespace potential_kind {

struct Free {};
struct ConstantForce {
  double f0 = 0.0;
};
struct Harmonic {
  double omega = 1.0;
};
/// Piecewise-constant schedule of coefficient sets; the first segment also
/// applies before its t_begin.
struct Polynomial {
  std::vector<PolynomialSegment> schedule;
};
/// Values on a grid with nearest-node lookup. `force` is precomputed.
struct Tabulated {
  Grid grid;
  std::vector<double> values;
  std::vector<double> force;
};

}  // namespace potential_kind

/// External potential V(x, t) plus the particle mass that every dynamical
/// module reads.
class PotentialSpec {
 public:
  using Kind = std::variant<potential_kind::Free, potential_kind::ConstantForce,
                            potential_kind::Harmonic, potential_kind::Polynomial,
                            potential_kind::Tabulated>;

  static PotentialSpec free(double mass = 1.0);
  /// V(x) = -f0 * x, so the force is the constant f0.
  static PotentialSpec constant_force(double f0, double mass = 1.0);
  /// V(x) = m omega^2 x^2 / 2.
  static PotentialSpec harmonic(double mass, double omega);
  static PotentialSpec polynomial(std::vector<double> coeffs, double mass = 1.0);
  static PotentialSpec polynomial_schedule(std::vector<PolynomialSegment> schedule,
                                           double mass = 1.0);
  static PotentialSpec tabulated(const RealField& values, double mass = 1.0);
  /// Two whitespace-separated columns (x, V) on a uniform power-of-two lattice.
  static PotentialSpec tabulated_from_file(const std::filesystem::path& path, double mass = 1.0);

  double mass() const { return mass_; }
  const Kind& kind() const { return kind_; }
  bool is_static() const;
  /// True when V is identically zero.
  bool is_free() const;
  /// Polynomial degree of V when it is a (time-independent) polynomial,
  /// counting Free as degree 0.
  std::optional<int> polynomial_degree() const;
  std::string describe() const;

 private:
  PotentialSpec(Kind kind, double mass);
  Kind kind_;
  double mass_;
};

inline constexpr int kMaxPolynomialDegree = 8;

double eval_potential(const PotentialSpec& spec, double x, double t);

/// -dV/dx: analytic for polynomial and builtin kinds, a non-periodic
/// difference stencil on the table for tabulated ones.
double eval_force(const PotentialSpec& spec, double x, double t);

/// Second derivative d^2V/dx^2 (analytic kinds only; tabulated uses the table).
double eval_curvature(const PotentialSpec& spec, double x, double t);

RealField potential_field(const PotentialSpec& spec, const Grid& grid, double t);
RealField force_field(const PotentialSpec& spec, const Grid& grid, double t);

}  // namespace sclab
