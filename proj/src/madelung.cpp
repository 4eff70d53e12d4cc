#include "sclab/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab {

namespace {

struct Support {
  std::vector<char> mask;
  std::size_t begin = 0;
  std::size_t end = 0;
};

Support find_support(std::span<const double> rho, double floor) {
  const double peak = *std::max_element(rho.begin(), rho.end());
  if (!(peak > 0.0)) throw DomainError("madelung: density vanishes everywhere");
  const double cut = floor * peak;
  Support s;
  s.mask.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) s.mask[i] = rho[i] < cut ? 1 : 0;
  const auto first = std::find(s.mask.begin(), s.mask.end(), 0);
  const auto last = std::find(s.mask.rbegin(), s.mask.rend(), 0);
  s.begin = static_cast<std::size_t>(first - s.mask.begin());
  s.end = rho.size() - static_cast<std::size_t>(last - s.mask.rbegin());
  for (std::size_t i = s.begin; i < s.end; ++i) {
    if (s.mask[i]) {
      throw NodeError("madelung: the density has a node inside its support (x index " +
                      std::to_string(i) + "); the phase cannot be unwrapped");
    }
  }
  return s;
}

double l2_over(const Grid& g, std::span<const double> r, std::size_t begin, std::size_t end) {
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += r[i] * r[i];
  return std::sqrt(s * g.dx());
}

}  // namespace

MadelungFields::MadelungFields(RealField rho, RealField S, double hbar, double floor)
    : rho_(std::move(rho)), S_(std::move(S)), hbar_(hbar), floor_(floor) {
  if (!(rho_.grid() == S_.grid())) throw DomainError("madelung: rho and S on different grids");
  if (!(hbar_ >= 0.0)) throw DomainError("madelung: hbar must be >= 0");
  for (double v : rho_.values()) {
    if (v < 0.0) throw DomainError("madelung: negative density");
  }
  const double mass = integrate(rho_);
  if (std::abs(mass - 1.0) > 1e-6) {
    throw DomainError("madelung: density integrates to " + std::to_string(mass) + ", not 1");
  }
  auto s = find_support(rho_.values(), floor_);
  mask_ = std::move(s.mask);
  begin_ = s.begin;
  end_ = s.end;
}

double MadelungFields::masked_fraction() const {
  const auto n = static_cast<double>(mask_.size());
  return (n - static_cast<double>(end_ - begin_)) / n;
}

MadelungFields to_madelung(const WaveFunction& psi, double floor,
                           const MadelungFields* reference) {
  const Grid& g = psi.grid();
  const auto v = psi.field().values();
  const double h = psi.hbar();
  std::vector<double> rho(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) rho[i] = std::norm(v[i]);
  const double total = integrate(g, rho);
  for (auto& r : rho) r /= total;

  const auto support = find_support(rho, floor);
  const auto anchor = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) -
                                               rho.begin());
  std::vector<double> phase(g.n(), 0.0);
  phase[anchor] = std::arg(v[anchor]);
  if (reference != nullptr) {
    if (!(reference->grid() == g)) throw DomainError("to_madelung: reference on another grid");
    if (reference->masked(anchor)) {
      throw DomainError("to_madelung: reference is masked at the density peak");
    }
    const double target = reference->S()[anchor] / h;
    const double turns = std::round((target - phase[anchor]) / (2.0 * std::numbers::pi));
    phase[anchor] += 2.0 * std::numbers::pi * turns;
  }
  // Minimal-increment rule: each neighbour differs by arg(psi_j / psi_i).
  constexpr double kAmbiguous = 0.9 * std::numbers::pi;
  auto walk = [&](std::size_t from, std::size_t to) {
    const double d = std::arg(v[to] / v[from]);
    if (std::abs(d) > kAmbiguous) {
      throw NodeError("to_madelung: phase jump of " + std::to_string(d) +
                      " rad between neighbours; unwrapping is ambiguous");
    }
    phase[to] = phase[from] + d;
  };
  for (std::size_t i = anchor + 1; i < support.end; ++i) walk(i - 1, i);
  for (std::size_t i = anchor; i > support.begin; --i) walk(i, i - 1);

  std::vector<double> S(g.n(), 0.0);
  for (std::size_t i = support.begin; i < support.end; ++i) S[i] = h * phase[i];
  return MadelungFields(RealField(g, std::move(rho)), RealField(g, std::move(S)), h, floor);
}

WaveFunction from_madelung(const MadelungFields& f, double mass, double t) {
  if (!(f.hbar() > 0.0)) throw DomainError("from_madelung: hbar must be > 0");
  const Grid& g = f.grid();
  std::vector<complex> v(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double amp = std::sqrt(f.rho()[i]);
    v[i] = f.masked(i) ? complex(amp, 0.0) : std::polar(amp, f.S()[i] / f.hbar());
  }
  double nrm = 0.0;
  for (const auto& z : v) nrm += std::norm(z);
  nrm = std::sqrt(nrm * g.dx());
  for (auto& z : v) z /= nrm;
  return WaveFunction(ComplexField(g, std::move(v)), f.hbar(), mass, t);
}

RealField quantum_term(const RealField& rho, double hbar, double mass, double floor) {
  if (!(mass > 0.0)) throw DomainError("quantum_term: mass must be > 0");
  const Grid& g = rho.grid();
  std::vector<double> q(g.n(), 0.0);
  if (hbar == 0.0) return RealField(g, std::move(q));
  const auto s = find_support(rho.values(), floor);
  std::vector<double> u(g.n(), 0.0);
  for (std::size_t i = s.begin; i < s.end; ++i) u[i] = 0.5 * std::log(rho[i]);
  const auto d1 = stencil_derivative(u, g.dx(), 1, s.begin, s.end);
  const auto d2 = stencil_derivative(u, g.dx(), 2, s.begin, s.end);
  const double c = -hbar * hbar / (2.0 * mass);
  for (std::size_t i = s.begin; i < s.end; ++i) {
    const std::size_t j = i - s.begin;
    q[i] = c * (d2[j] + d1[j] * d1[j]);
  }
  return RealField(g, std::move(q));
}

RealField action_rate(const MadelungFields& before, const MadelungFields& after, double dt) {
  if (!(before.grid() == after.grid())) throw DomainError("action_rate: grid mismatch");
  if (!(dt > 0.0)) throw DomainError("action_rate: dt must be > 0");
  const Grid& g = before.grid();
  std::vector<double> r(g.n(), 0.0);
  const std::size_t b = std::max(before.support_begin(), after.support_begin());
  const std::size_t e = std::min(before.support_end(), after.support_end());
  for (std::size_t i = b; i < e; ++i) r[i] = (after.S()[i] - before.S()[i]) / dt;
  return RealField(g, std::move(r));
}

double continuity_residual(const MadelungFields& f1, const MadelungFields& f2, double dt,
                           double mass) {
  if (!(f1.grid() == f2.grid())) throw DomainError("continuity_residual: grid mismatch");
  if (!(dt > 0.0)) throw DomainError("continuity_residual: dt must be > 0");
  if (!(mass > 0.0)) throw DomainError("continuity_residual: mass must be > 0");
  const Grid& g = f1.grid();
  const std::size_t b = std::max(f1.support_begin(), f2.support_begin());
  const std::size_t e = std::min(f1.support_end(), f2.support_end());
  if (e <= b) throw DomainError("continuity_residual: snapshots have disjoint support");

  std::vector<double> S_mid(g.n(), 0.0);
  for (std::size_t i = b; i < e; ++i) S_mid[i] = 0.5 * (f1.S()[i] + f2.S()[i]);
  const auto Sx = stencil_derivative(S_mid, g.dx(), 1, b, e);
  std::vector<double> flux(g.n(), 0.0);
  for (std::size_t i = b; i < e; ++i) {
    flux[i] = 0.5 * (f1.rho()[i] + f2.rho()[i]) * Sx[i - b] / mass;
  }
  const auto div = stencil_derivative(flux, g.dx(), 1, b, e);
  std::vector<double> r(g.n(), 0.0);
  for (std::size_t i = b; i < e; ++i) r[i] = (f2.rho()[i] - f1.rho()[i]) / dt + div[i - b];
  return l2_over(g, r, b, e);
}

double quantum_term_norm(const MadelungFields& f, double mass) {
  const auto q = quantum_term(f.rho(), f.hbar(), mass, f.floor());
  return l2_over(f.grid(), q.values(), f.support_begin(), f.support_end());
}

double hj_residual(const MadelungFields& f, const RealField& dS_dt, const PotentialSpec& V,
                   HjMode mode, double t) {
  if (!(dS_dt.grid() == f.grid())) throw DomainError("hj_residual: grid mismatch");
  if (mode == HjMode::Quantum && !(f.hbar() > 0.0)) {
    throw DomainError("hj_residual: Quantum mode needs hbar > 0; use Classical mode at hbar = 0");
  }
  const Grid& g = f.grid();
  const double m = V.mass();
  const std::size_t b = f.support_begin();
  const std::size_t e = f.support_end();
  const auto Sx = stencil_derivative(f.S().values(), g.dx(), 1, b, e);
  std::vector<double> r(g.n(), 0.0);
  for (std::size_t i = b; i < e; ++i) {
    const double sx = Sx[i - b];
    r[i] = dS_dt[i] + sx * sx / (2.0 * m) + eval_potential(V, g.x(i), t);
  }
  if (mode == HjMode::Quantum) {
    const auto q = quantum_term(f.rho(), f.hbar(), m, f.floor());
    for (std::size_t i = b; i < e; ++i) r[i] += q[i];
  }
  return l2_over(g, r, b, e);
}

}  // namespace sclab
