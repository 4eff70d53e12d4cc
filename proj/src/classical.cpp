#include "sclab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab {

PhasePoint verlet_step(const PotentialSpec& V, PhasePoint z, double t, double dt) {
  const double m = V.mass();
  const double half = z.p + 0.5 * dt * eval_force(V, z.r, t);
  const double r = z.r + dt * half / m;
  return {r, half + 0.5 * dt * eval_force(V, r, t + dt)};
}

double Trajectory::max_energy_drift() const {
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()));
  return worst;
}

Trajectory newton_integrate(const PotentialSpec& V, double r0, double p0, double dt,
                            std::size_t n_steps, double escape_bound, double t0) {
  if (!(dt > 0.0)) throw DomainError("newton_integrate: dt must be > 0");
  const double m = V.mass();
  Trajectory tr;
  tr.times.reserve(n_steps + 1);
  tr.r.reserve(n_steps + 1);
  tr.p.reserve(n_steps + 1);
  tr.energy.reserve(n_steps + 1);
  PhasePoint z{r0, p0};
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.r.push_back(z.r);
    tr.p.push_back(z.p);
    tr.energy.push_back(z.p * z.p / (2.0 * m) + eval_potential(V, z.r, t));
  };
  record(t0);
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double t = t0 + static_cast<double>(s) * dt;
    z = verlet_step(V, z, t, dt);
    if (!(std::abs(z.r) <= escape_bound)) {
      throw EscapeError("newton_integrate: |r| = " + std::to_string(std::abs(z.r)) +
                        " exceeded the bound " + std::to_string(escape_bound) + " at t = " +
                        std::to_string(t + dt));
    }
    record(t0 + static_cast<double>(s + 1) * dt);
  }
  return tr;
}

// ---------------------------------------------------------------------------

namespace {

void check_axis(const PhaseAxis& a, const char* name) {
  if (a.n < 2 || !(a.max > a.min)) {
    throw DomainError(std::string("phase density: bad ") + name + " axis");
  }
}

}  // namespace

PhaseDensity::PhaseDensity(PhaseAxis x, PhaseAxis p, std::vector<double> values)
    : x_(x), p_(p), values_(std::move(values)) {
  check_axis(x_, "x");
  check_axis(p_, "p");
  if (values_.size() != x_.n * p_.n) throw DomainError("phase density: size mismatch");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("phase density: values must be finite and >= 0");
    }
  }
}

PhaseDensity PhaseDensity::gaussian(PhaseAxis x, PhaseAxis p, double x0, double p0, double sx,
                                    double sp) {
  if (!(sx > 0.0) || !(sp > 0.0)) throw DomainError("phase density: widths must be > 0");
  check_axis(x, "x");
  check_axis(p, "p");
  std::vector<double> v(x.n * p.n);
  double total = 0.0;
  for (std::size_t i = 0; i < x.n; ++i) {
    const double a = (x.at(i) - x0) / sx;
    for (std::size_t j = 0; j < p.n; ++j) {
      const double b = (p.at(j) - p0) / sp;
      v[i * p.n + j] = std::exp(-0.5 * (a * a + b * b));
      total += v[i * p.n + j];
    }
  }
  const double scale = 1.0 / (total * x.step() * p.step());
  for (auto& e : v) e *= scale;
  return PhaseDensity(x, p, std::move(v));
}

double PhaseDensity::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * x_.step() * p_.step();
}

double PhaseDensity::sample(double x, double p) const {
  const double fx = (x - x_.min) / x_.step();
  const double fp = (p - p_.min) / p_.step();
  const auto last_x = static_cast<double>(x_.n - 1);
  const auto last_p = static_cast<double>(p_.n - 1);
  if (!(fx >= 0.0 && fx <= last_x && fp >= 0.0 && fp <= last_p)) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(fx), x_.n - 2);
  const auto j = std::min(static_cast<std::size_t>(fp), p_.n - 2);
  const double a = fx - static_cast<double>(i);
  const double b = fp - static_cast<double>(j);
  return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i + 1, j) + (1 - a) * b * at(i, j + 1) +
         a * b * at(i + 1, j + 1);
}

PhasePoint PhaseDensity::centroid() const {
  double s = 0.0, sx = 0.0, sp = 0.0;
  for (std::size_t i = 0; i < x_.n; ++i) {
    for (std::size_t j = 0; j < p_.n; ++j) {
      const double v = at(i, j);
      s += v;
      sx += v * x_.at(i);
      sp += v * p_.at(j);
    }
  }
  return {sx / s, sp / s};
}

std::vector<double> PhaseDensity::p_marginal() const {
  std::vector<double> m(p_.n, 0.0);
  for (std::size_t i = 0; i < x_.n; ++i) {
    for (std::size_t j = 0; j < p_.n; ++j) m[j] += at(i, j);
  }
  for (auto& v : m) v *= x_.step();
  return m;
}

double PhaseDensity::l1_distance(const PhaseDensity& other) const {
  if (other.x_.n != x_.n || other.p_.n != p_.n || other.x_.min != x_.min ||
      other.x_.max != x_.max || other.p_.min != p_.min || other.p_.max != p_.max) {
    throw DomainError("phase density: axes differ");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s += std::abs(values_[k] - other.values_[k]);
  return s * x_.step() * p_.step();
}

PhaseDensity liouville_evolve(const PhaseDensity& rho0, const PotentialSpec& V, double t,
                              double dt, double t0) {
  if (!(dt > 0.0)) throw DomainError("liouville_evolve: dt must be > 0");
  if (!(t >= 0.0)) throw DomainError("liouville_evolve: t must be >= 0");
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
  const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
  const auto& ax = rho0.x_axis();
  const auto& ap = rho0.p_axis();
  std::vector<double> out(ax.n * ap.n);
  for (std::size_t i = 0; i < ax.n; ++i) {
    for (std::size_t j = 0; j < ap.n; ++j) {
      PhasePoint z{ax.at(i), ap.at(j)};
      for (std::size_t s = 0; s < steps; ++s) {
        z = verlet_step(V, z, t0 + t - static_cast<double>(s) * h, -h);
      }
      out[i * ap.n + j] = rho0.sample(z.r, z.p);
    }
  }
  PhaseDensity rho(ax, ap, std::move(out));
  const double m0 = rho0.mass();
  const double drift = std::abs(rho.mass() - m0) / m0;
  if (drift > kMassDriftTolerance) {
    throw MassDriftError("liouville_evolve: phase-space mass drifted by " +
                             std::to_string(drift) + " (grid too coarse or too small)",
                         drift);
  }
  return rho;
}

std::pair<PhaseAxis, PhaseAxis> fit_phase_axes(const PotentialSpec& V, double x0, double p0,
                                               double sx, double sp, double t, std::size_t n) {
  double xlo = x0 - 6 * sx, xhi = x0 + 6 * sx;
  double plo = p0 - 6 * sp, phi = p0 + 6 * sp;
  const std::size_t steps = 400;
  const double dt = t > 0.0 ? t / steps : 0.0;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      PhasePoint z{x0 + 3 * a * sx, p0 + 3 * b * sp};
      for (std::size_t s = 0; s <= steps; ++s) {
        xlo = std::min(xlo, z.r - 3 * sx);
        xhi = std::max(xhi, z.r + 3 * sx);
        plo = std::min(plo, z.p - 3 * sp);
        phi = std::max(phi, z.p + 3 * sp);
        if (dt > 0.0 && s < steps) z = verlet_step(V, z, static_cast<double>(s) * dt, dt);
      }
    }
  }
  return {PhaseAxis{xlo, xhi, n}, PhaseAxis{plo, phi, n}};
}

// ---------------------------------------------------------------------------

const std::vector<TestFunction>& default_test_functions() {
  static const std::vector<TestFunction> tests{
      {"x", [](double x, double) { return x; }, [](double, double) { return 1.0; },
       [](double, double) { return 0.0; }},
      {"p", [](double, double p) { return p; }, [](double, double) { return 0.0; },
       [](double, double) { return 1.0; }},
      {"x^2", [](double x, double) { return x * x; }, [](double x, double) { return 2 * x; },
       [](double, double) { return 0.0; }},
      {"xp", [](double x, double p) { return x * p; }, [](double, double p) { return p; },
       [](double x, double) { return x; }},
      {"p^2", [](double, double p) { return p * p; }, [](double, double) { return 0.0; },
       [](double, double p) { return 2 * p; }},
  };
  return tests;
}

double delta_ansatz_residual(const Trajectory& traj, const PotentialSpec& V,
                             const std::vector<TestFunction>& tests) {
  if (traj.size() < 3) throw DomainError("delta_ansatz_residual: need at least 3 samples");
  const double m = V.mass();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double h = traj.times[k + 1] - traj.times[k - 1];
    const double r = traj.r[k], p = traj.p[k];
    const double f = eval_force(V, r, traj.times[k]);
    for (const auto& phi : tests) {
      const double lhs =
          (phi.value(traj.r[k + 1], traj.p[k + 1]) - phi.value(traj.r[k - 1], traj.p[k - 1])) /
          h;
      const double rhs = p / m * phi.dx(r, p) + f * phi.dp(r, p);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

double delta_ansatz_check(const PotentialSpec& V, double r0, double p0, double t_final,
                          double dt) {
  const auto n = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-12));
  return delta_ansatz_residual(newton_integrate(V, r0, p0, t_final / static_cast<double>(n), n),
                               V);
}

// ---------------------------------------------------------------------------

ExpectationSample expectation_sample(const WaveFunction& psi, const PotentialSpec& V) {
  const auto o = observables(psi);
  ExpectationSample s;
  s.t = psi.time();
  s.x_mean = o.x_mean;
  s.p_mean = o.p_mean;
  s.mean_force = mean_force(psi, V);
  s.force_at_mean = eval_force(V, o.x_mean, psi.time());
  return s;
}

std::vector<ExpectationSample> quantum_expectations(const WaveFunction& psi0,
                                                    const PotentialSpec& V, double dt,
                                                    std::size_t every, std::size_t n_samples) {
  Propagator prop(psi0.grid(), V, psi0.hbar(), dt);
  std::vector<ExpectationSample> out;
  out.reserve(n_samples);
  WaveFunction psi = psi0;
  out.push_back(expectation_sample(psi, V));
  while (out.size() < n_samples) {
    psi = prop.advance(psi, every);
    out.push_back(expectation_sample(psi, V));
  }
  return out;
}

EhrenfestResiduals ehrenfest_residuals(const std::vector<ExpectationSample>& samples,
                                       double mass) {
  if (samples.size() < 3) throw DomainError("ehrenfest_residuals: need at least 3 samples");
  const double step = samples[1].t - samples[0].t;
  std::vector<double> x, p;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k > 0 && std::abs(samples[k].t - samples[k - 1].t - step) > 1e-9 * std::abs(step)) {
      throw DomainError("ehrenfest_residuals: samples are not uniformly spaced");
    }
    x.push_back(samples[k].x_mean);
    p.push_back(samples[k].p_mean);
  }
  const auto dx = time_derivative(x, step);
  const auto dp = time_derivative(p, step);
  EhrenfestResiduals r;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    r.residual1.push_back(dx[k] - p[k] / mass);
    r.residual2.push_back(dp[k] - samples[k].mean_force);
    r.force_gap.push_back(dp[k] - samples[k].force_at_mean);
  }
  return r;
}

}  // namespace sclab
