#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sclab/grid.hpp"
#include "sclab/potential.hpp"
#include "sclab/schrodinger.hpp"

namespace sclab {

inline constexpr double kDensityFloor = 1e-12;

/// Density and action of psi = sqrt(rho) exp(i S / hbar). Nodes where
/// rho < floor * max(rho) are masked; the unmasked nodes form one contiguous
/// run [support_begin, support_end).
class MadelungFields {
 public:
  /// Validates rho >= 0 and normalization (1e-6), builds the mask and checks
  /// that the unmasked set is connected (NodeError otherwise).
  MadelungFields(RealField rho, RealField S, double hbar, double floor = kDensityFloor);

  const Grid& grid() const { return rho_.grid(); }
  const RealField& rho() const { return rho_; }
  const RealField& S() const { return S_; }
  double hbar() const { return hbar_; }
  double floor() const { return floor_; }
  bool masked(std::size_t i) const { return mask_[i] != 0; }
  std::size_t support_begin() const { return begin_; }
  std::size_t support_end() const { return end_; }
  double masked_fraction() const;

 private:
  RealField rho_;
  RealField S_;
  double hbar_;
  double floor_;
  std::vector<char> mask_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
};

/// rho = |psi|^2, S = hbar * arg(psi) unwrapped outward from the density
/// peak. With a reference the 2 pi branch at the peak is chosen closest to
/// the reference action there, which keeps S continuous in time.
MadelungFields to_madelung(const WaveFunction& psi, double floor = kDensityFloor,
                           const MadelungFields* reference = nullptr);

/// psi = sqrt(rho) exp(i S / hbar), zero phase on masked nodes.
WaveFunction from_madelung(const MadelungFields& f, double mass, double t = 0.0);

/// -(hbar^2 / 2m) * (sqrt rho)'' / sqrt rho on the unmasked run, zero on
/// masked nodes. Evaluated as -(hbar^2/2m)(u'' + u'^2) with u = ln(rho)/2.
RealField quantum_term(const RealField& rho, double hbar, double mass,
                       double floor = kDensityFloor);

/// Centered time derivative of S between two snapshots dt apart, on the
/// nodes unmasked in both (zero elsewhere).
RealField action_rate(const MadelungFields& before, const MadelungFields& after, double dt);

/// L2 norm of d(rho)/dt + d/dx(rho S_x / m) at the midpoint of two snapshots.
double continuity_residual(const MadelungFields& f1, const MadelungFields& f2, double dt,
                           double mass);

enum class HjMode { Quantum, Classical };

/// L2 norm over unmasked nodes of S_t + S_x^2/(2m) + V, plus the quantum
/// term in Quantum mode (the QHJ and classical HJ equations).
double hj_residual(const MadelungFields& f, const RealField& dS_dt, const PotentialSpec& V,
                   HjMode mode, double t = 0.0);

/// L2 norm of the quantum term over the unmasked run.
double quantum_term_norm(const MadelungFields& f, double mass);

}  // namespace sclab
