#include "sclab/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sclab/fft.hpp"

namespace sclab {

namespace {

double boundary_fraction_of(std::span<const complex> psi, double margin) {
  const std::size_t n = psi.size();
  const auto edge = static_cast<std::size_t>(std::floor(margin * static_cast<double>(n)));
  double total = 0.0;
  double outer = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::norm(psi[i]);
    total += d;
    if (i < edge || i >= n - edge) outer += d;
  }
  return total > 0.0 ? outer / total : 0.0;
}

double norm_of(const Grid& grid, std::span<const complex> psi) {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return s * grid.dx();
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

WaveFunction::WaveFunction(ComplexField psi, double hbar, double mass, double t)
    : psi_(std::move(psi)), hbar_(hbar), mass_(mass), t_(t) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("wave function: hbar must be > 0");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("wave function: mass must be > 0");
}

double WaveFunction::norm() const { return norm_of(grid(), psi_.values()); }

double WaveFunction::boundary_fraction(double margin) const {
  return boundary_fraction_of(psi_.values(), margin);
}

void WaveFunction::check_leakage(double tolerance) const {
  const double f = boundary_fraction();
  if (f > tolerance) {
    throw BoundaryLeak("boundary leak: " + fmt_double(f) +
                           " of the probability lies in the outer 5% of the grid",
                       f);
  }
}

WaveFunction init_gaussian(const Grid& grid, double epsilon, double r0, double p0, double hbar,
                           double mass) {
  if (!(epsilon > 0.0)) throw DomainError("init_gaussian: epsilon must be > 0");
  if (!(hbar > 0.0)) throw DomainError("init_gaussian: hbar must be > 0");
  std::vector<complex> v(grid.n());
  const double amp = std::pow(std::numbers::pi * epsilon, -0.25);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double x = grid.x(i);
    const double y = x - r0;
    v[i] = amp * std::exp(-y * y / (2.0 * epsilon)) * std::polar(1.0, p0 * x / hbar);
  }
  const double nrm = std::sqrt(norm_of(grid, v));
  if (!(nrm > 0.0)) throw BoundaryLeak("init_gaussian: packet has no mass on the grid", 1.0);
  for (auto& z : v) z /= nrm;
  WaveFunction psi(ComplexField(grid, std::move(v)), hbar, mass, 0.0);
  psi.check_leakage();
  return psi;
}

double max_stable_step(const Grid& grid, const PotentialSpec& V, double hbar) {
  if (V.is_free()) return std::numeric_limits<double>::infinity();
  const double k = grid.k_max();
  const double kinetic = V.mass() / (hbar * k * k);
  std::vector<double> times{0.0};
  if (const auto* p = std::get_if<potential_kind::Polynomial>(&V.kind())) {
    for (const auto& seg : p->schedule) times.push_back(seg.t_begin);
  }
  double range = 0.0;
  for (double t : times) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < grid.n(); ++i) {
      const double v = eval_potential(V, grid.x(i), t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    range = std::max(range, hi - lo);
  }
  const double potential = range > 0.0 ? hbar / range : std::numeric_limits<double>::infinity();
  return std::min(kinetic, potential);
}

Propagator::Propagator(const Grid& grid, const PotentialSpec& V, double hbar, double dt)
    : grid_(grid), V_(V), hbar_(hbar), mass_(V.mass()), dt_(dt) {
  if (!(dt > 0.0)) throw DomainError("propagate: dt must be > 0");
  if (!(hbar > 0.0)) throw DomainError("propagate: hbar must be > 0");
  const double limit = max_stable_step(grid, V, hbar);
  if (dt > limit * (1.0 + 1e-12)) {
    throw DomainError("propagate: dt = " + fmt_double(dt) + " exceeds the step limit " +
                      fmt_double(limit));
  }
  const auto k = grid.wavenumbers();
  kinetic_.resize(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    kinetic_[j] = std::polar(1.0, -hbar * k[j] * k[j] * dt / (2.0 * mass_));
  }
  if (V.is_static()) static_half_kick_ = potential_phase(0.0);
}

std::vector<complex> Propagator::potential_phase(double t) const {
  std::vector<complex> kick(grid_.n());
  for (std::size_t i = 0; i < grid_.n(); ++i) {
    kick[i] = std::polar(1.0, -eval_potential(V_, grid_.x(i), t) * dt_ / (2.0 * hbar_));
  }
  return kick;
}

void Propagator::step(std::vector<complex>& psi, double t) const {
  const bool fixed = !static_half_kick_.empty();
  std::vector<complex> moving;
  if (!fixed) moving = potential_phase(t);
  const auto& first = fixed ? static_half_kick_ : moving;
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= first[i];
  fft::forward(psi);
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= kinetic_[j];
  fft::inverse(psi);
  if (!fixed) moving = potential_phase(t + dt_);
  const auto& second = fixed ? static_half_kick_ : moving;
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= second[i];
}

WaveFunction Propagator::advance(const WaveFunction& psi, std::size_t n_steps) const {
  if (!(psi.grid() == grid_)) throw DomainError("propagate: wave function is on another grid");
  if (psi.hbar() != hbar_ || psi.mass() != mass_) {
    throw DomainError("propagate: hbar or mass differs from the propagator's");
  }
  std::vector<complex> state(psi.field().values().begin(), psi.field().values().end());
  std::vector<complex> previous;
  const double norm0 = norm_of(grid_, state);
  double t = psi.time();
  for (std::size_t s = 0; s < n_steps; ++s) {
    previous = state;
    step(state, t);
    const double f = boundary_fraction_of(state, 0.05);
    if (f > kLeakTolerance) {
      throw PropagationLeak("boundary leak at t = " + fmt_double(t + dt_) + ": fraction " +
                                fmt_double(f) + " in the outer 5% of the grid",
                            f, WaveFunction(ComplexField(grid_, previous), hbar_, mass_, t));
    }
    t = psi.time() + static_cast<double>(s + 1) * dt_;
  }
  const double norm1 = norm_of(grid_, state);
  if (std::abs(norm1 - norm0) > kNormTolerance * norm0) {
    throw NumericFailure("propagate: norm drifted from " + fmt_double(norm0) + " to " +
                         fmt_double(norm1));
  }
  return WaveFunction(ComplexField(grid_, std::move(state)), hbar_, mass_, t);
}

WaveFunction propagate(const WaveFunction& psi, const PotentialSpec& V, double dt,
                       std::size_t n_steps) {
  if (std::abs(V.mass() - psi.mass()) > 0.0) {
    throw DomainError("propagate: potential mass differs from the wave function's");
  }
  return Propagator(psi.grid(), V, psi.hbar(), dt).advance(psi, n_steps);
}

Observables observables(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  const auto v = psi.field().values();
  double total = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = std::norm(v[i]);
    total += d;
    m1 += d * g.x(i);
  }
  Observables o;
  o.x_mean = m1 / total;
  double m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = std::norm(v[i]);
    const double y = g.x(i) - o.x_mean;
    m2 += d * y * y;
    m4 += d * y * y * y * y;
  }
  o.var_x = m2 / total;
  o.kurtosis_excess = (m4 / total) / (o.var_x * o.var_x) - 3.0;

  std::vector<complex> spec(v.begin(), v.end());
  fft::forward(spec);
  const auto k = g.wavenumbers();
  double ptot = 0.0, pk1 = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double d = std::norm(spec[j]);
    ptot += d;
    pk1 += d * k[j];
  }
  const double kmean = pk1 / ptot;
  double pk2 = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double dk = k[j] - kmean;
    pk2 += std::norm(spec[j]) * dk * dk;
  }
  o.p_mean = psi.hbar() * kmean;
  o.var_p = psi.hbar() * psi.hbar() * pk2 / ptot;
  o.uncertainty_product = std::sqrt(o.var_x * o.var_p);
  o.width = 2.0 * o.var_x;
  return o;
}

double energy(const WaveFunction& psi, const PotentialSpec& V) {
  const Grid& g = psi.grid();
  const auto v = psi.field().values();
  double total = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = std::norm(v[i]);
    total += d;
    pot += d * eval_potential(V, g.x(i), psi.time());
  }
  std::vector<complex> spec(v.begin(), v.end());
  fft::forward(spec);
  const auto k = g.wavenumbers();
  double ptot = 0.0, kin = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double d = std::norm(spec[j]);
    ptot += d;
    kin += d * k[j] * k[j];
  }
  const double h = psi.hbar();
  return h * h * kin / (2.0 * psi.mass() * ptot) + pot / total;
}

double mean_force(const WaveFunction& psi, const PotentialSpec& V) {
  const Grid& g = psi.grid();
  const auto v = psi.field().values();
  double total = 0.0, f = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = std::norm(v[i]);
    total += d;
    f += d * eval_force(V, g.x(i), psi.time());
  }
  return f / total;
}

// ---------------------------------------------------------------------------

GaussianSolution::GaussianSolution(GaussianParams params) : params_(params) {
  if (!(params_.epsilon0 > 0.0)) throw DomainError("gaussian solution: epsilon0 must be > 0");
  if (!(params_.hbar >= 0.0)) throw DomainError("gaussian solution: hbar must be >= 0");
  if (!(params_.mass > 0.0)) throw DomainError("gaussian solution: mass must be > 0");
  if (params_.kind == PacketCase::Harmonic && !(params_.omega > 0.0)) {
    throw DomainError("gaussian solution: omega must be > 0");
  }
}

double GaussianSolution::width(double t) const {
  const auto& q = params_;
  if (q.kind == PacketCase::Harmonic) {
    const double g = q.hbar / (q.epsilon0 * q.mass * q.omega);
    const double c = std::cos(q.omega * t);
    const double s = std::sin(q.omega * t);
    return q.epsilon0 * (c * c + g * g * s * s);
  }
  const double b = q.hbar / (q.epsilon0 * q.mass);
  return q.epsilon0 * (1.0 + b * b * t * t);
}

double GaussianSolution::width_rate(double t) const {
  const auto& q = params_;
  if (q.kind == PacketCase::Harmonic) {
    const double g = q.hbar / (q.epsilon0 * q.mass * q.omega);
    return q.epsilon0 * q.omega * (g * g - 1.0) * std::sin(2.0 * q.omega * t);
  }
  const double b = q.hbar / (q.epsilon0 * q.mass);
  return 2.0 * q.epsilon0 * b * b * t;
}

double GaussianSolution::width_acceleration(double t) const {
  const auto& q = params_;
  if (q.kind == PacketCase::Harmonic) {
    const double g = q.hbar / (q.epsilon0 * q.mass * q.omega);
    return 2.0 * q.epsilon0 * q.omega * q.omega * (g * g - 1.0) * std::cos(2.0 * q.omega * t);
  }
  const double b = q.hbar / (q.epsilon0 * q.mass);
  return 2.0 * q.epsilon0 * b * b;
}

double GaussianSolution::position(double t) const {
  const auto& q = params_;
  switch (q.kind) {
    case PacketCase::Free:
      return q.r0 + q.p0 * t / q.mass;
    case PacketCase::ConstantForce:
      return q.r0 + q.p0 * t / q.mass + q.f0 * t * t / (2.0 * q.mass);
    case PacketCase::Harmonic:
      return q.r0 * std::cos(q.omega * t) + q.p0 / (q.mass * q.omega) * std::sin(q.omega * t);
  }
  throw DomainError("gaussian solution: unknown case");
}

double GaussianSolution::momentum(double t) const {
  const auto& q = params_;
  switch (q.kind) {
    case PacketCase::Free:
      return q.p0;
    case PacketCase::ConstantForce:
      return q.p0 + q.f0 * t;
    case PacketCase::Harmonic:
      return q.p0 * std::cos(q.omega * t) - q.mass * q.omega * q.r0 * std::sin(q.omega * t);
  }
  throw DomainError("gaussian solution: unknown case");
}

GaussianPacketState GaussianSolution::state(double t) const {
  return GaussianPacketState{width(t),     position(t), momentum(t),    params_.epsilon0,
                             params_.hbar, params_.mass, params_.omega};
}

PotentialSpec GaussianSolution::potential() const {
  switch (params_.kind) {
    case PacketCase::Free:
      return PotentialSpec::free(params_.mass);
    case PacketCase::ConstantForce:
      return PotentialSpec::constant_force(params_.f0, params_.mass);
    case PacketCase::Harmonic:
      return PotentialSpec::harmonic(params_.mass, params_.omega);
  }
  throw DomainError("gaussian solution: unknown case");
}

double GaussianSolution::density(double x, double t) const {
  const double e = width(t);
  const double y = x - position(t);
  return std::exp(-y * y / e) / std::sqrt(std::numbers::pi * e);
}

double GaussianSolution::curvature_coefficient(double t) const {
  return params_.mass * width_rate(t) / (4.0 * width(t));
}

// Integral of p^2/2m - V(r) along the centre trajectory.
double GaussianSolution::lagrangian(double t) const {
  const auto& q = params_;
  if (q.kind == PacketCase::ConstantForce) {
    const double m = q.mass, f = q.f0, p0 = q.p0, r0 = q.r0;
    const double kinetic =
        p0 * p0 * t / (2 * m) + p0 * f * t * t / (2 * m) + f * f * t * t * t / (6 * m);
    const double work = f * (r0 * t + p0 * t * t / (2 * m) + f * t * t * t / (6 * m));
    return kinetic + work;
  }
  // d(p r)/dt = 2 L for the free and harmonic flows.
  return 0.5 * (momentum(t) * position(t) - q.p0 * q.r0);
}

// -integral of hbar^2 / (2 m eps(t)).
double GaussianSolution::time_phase(double t) const {
  const auto& q = params_;
  if (q.hbar == 0.0) return 0.0;
  if (q.kind == PacketCase::Harmonic) {
    const double g = q.hbar / (q.epsilon0 * q.mass * q.omega);
    const double phi = q.omega * t;
    const double branch = std::round(phi / std::numbers::pi);
    const double unwrapped =
        branch * std::numbers::pi + std::atan(g * std::tan(phi - branch * std::numbers::pi));
    return -0.5 * q.hbar * unwrapped;
  }
  const double b = q.hbar / (q.epsilon0 * q.mass);
  return -0.5 * q.hbar * std::atan(b * t);
}

double GaussianSolution::time_phase_rate(double t) const {
  const auto& q = params_;
  return -q.hbar * q.hbar / (2.0 * q.mass * width(t));
}

double GaussianSolution::action(double x, double t) const {
  const double y = x - position(t);
  const double p = momentum(t);
  return curvature_coefficient(t) * y * y + p * y + params_.p0 * params_.r0 + lagrangian(t) +
         time_phase(t);
}

double GaussianSolution::action_rate(double x, double t) const {
  const auto& q = params_;
  const double e = width(t);
  const double ed = width_rate(t);
  const double edd = width_acceleration(t);
  const double a = q.mass * ed / (4.0 * e);
  const double a_dot = 0.25 * q.mass * (edd / e - (ed / e) * (ed / e));
  const double r = position(t);
  const double p = momentum(t);
  const double r_dot = p / q.mass;
  const PotentialSpec V = potential();
  const double p_dot = eval_force(V, r, t);
  const double y = x - r;
  const double lag = p * p / (2.0 * q.mass) - eval_potential(V, r, t);
  return a_dot * y * y - 2.0 * a * r_dot * y + p_dot * y - p * r_dot + lag + time_phase_rate(t);
}

RealField GaussianSolution::density_field(const Grid& grid, double t) const {
  return RealField::sample(grid, [&](double x) { return density(x, t); });
}

RealField GaussianSolution::action_field(const Grid& grid, double t) const {
  return RealField::sample(grid, [&](double x) { return action(x, t); });
}

RealField GaussianSolution::action_rate_field(const Grid& grid, double t) const {
  return RealField::sample(grid, [&](double x) { return action_rate(x, t); });
}

WaveFunction GaussianSolution::wavefunction(const Grid& grid, double t) const {
  if (!(params_.hbar > 0.0)) throw DomainError("gaussian solution: wave function needs hbar > 0");
  std::vector<complex> v(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double x = grid.x(i);
    v[i] = std::sqrt(density(x, t)) * std::polar(1.0, action(x, t) / params_.hbar);
  }
  return WaveFunction(ComplexField(grid, std::move(v)), params_.hbar, params_.mass, t);
}

GaussianPacketState analytic_gaussian(PacketCase kind, double epsilon0, double p0, double hbar,
                                      double mass, double parameter, double t) {
  GaussianParams q;
  q.kind = kind;
  q.epsilon0 = epsilon0;
  q.p0 = p0;
  q.hbar = hbar;
  q.mass = mass;
  if (kind == PacketCase::Harmonic) q.omega = parameter;
  if (kind == PacketCase::ConstantForce) q.f0 = parameter;
  return GaussianSolution(q).state(t);
}

}  // namespace sclab
