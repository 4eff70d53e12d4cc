#include "sclab/phj.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sclab/numerics.hpp"

namespace sclab {

namespace {

// Fourth-order symplectic composition of three Verlet steps.
const double kCbrt2 = std::cbrt(2.0);
const double kOuter = 1.0 / (2.0 - kCbrt2);
const double kInner = -kCbrt2 / (2.0 - kCbrt2);

struct Particle {
  double r;
  double p;
  double S;
};

// One Verlet substep; the action gains the discrete Lagrangian of the step.
void substep(const PotentialSpec& V, Particle& c, double t, double h) {
  const double m = V.mass();
  const double v_a = eval_potential(V, c.r, t);
  const double half = c.p + 0.5 * h * eval_force(V, c.r, t);
  c.r += h * half / m;
  const double v_b = eval_potential(V, c.r, t + h);
  c.p = half + 0.5 * h * eval_force(V, c.r, t + h);
  c.S += h * (half * half / (2.0 * m) - 0.5 * (v_a + v_b));
}

void symplectic_step(const PotentialSpec& V, Particle& c, double t, double h) {
  substep(V, c, t, kOuter * h);
  substep(V, c, t + kOuter * h, kInner * h);
  substep(V, c, t + (kOuter + kInner) * h, kOuter * h);
}

std::vector<double> fan_jacobian(std::span<const double> x, double spacing) {
  const std::size_t n = x.size();
  std::vector<double> J(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == 0) {
      J[j] = (x[1] - x[0]) / spacing;
    } else if (j + 1 == n) {
      J[j] = (x[j] - x[j - 1]) / spacing;
    } else {
      J[j] = (x[j + 1] - x[j - 1]) / (2.0 * spacing);
    }
  }
  return J;
}

// Cubic Lagrange interpolation on non-uniform increasing nodes.
double lagrange4(std::span<const double> xs, std::span<const double> ys, double x) {
  const std::size_t n = xs.size();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  auto hi = static_cast<std::size_t>(it - xs.begin());
  hi = std::clamp<std::size_t>(hi, 2, n - 2);
  const std::size_t lo = hi - 2;
  double s = 0.0;
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double w = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b) {
      if (b != a) w *= (x - xs[b]) / (xs[a] - xs[b]);
    }
    s += w * ys[a];
  }
  return s;
}

bool uniform_times(std::span<const double> t) {
  if (t.size() < 2) return true;
  const double step = t[1] - t[0];
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs(t[k] - t[k - 1] - step) > 1e-9 * std::max(1.0, std::abs(step))) return false;
  }
  return true;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

const FanSnapshot& CharacteristicFan::at(double t) const {
  for (const auto& s : snapshots) {
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
  }
  throw DomainError("characteristic fan: no snapshot at t = " + fmt(t));
}

CharacteristicFan trace_characteristics(const RealField& S0, const PotentialSpec& V,
                                        double t_final, const FanOptions& options) {
  if (!(t_final > 0.0)) throw DomainError("trace_characteristics: t_final must be > 0");
  if (!(options.dt > 0.0)) throw DomainError("trace_characteristics: dt must be > 0");
  if (options.oversample < 1 || options.snapshot_every < 1) {
    throw DomainError("trace_characteristics: oversample and snapshot_every must be >= 1");
  }
  const Grid& g = S0.grid();
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / options.dt - 1e-9));
  const double h = t_final / static_cast<double>(steps);

  CharacteristicFan fan;
  fan.mass = V.mass();
  fan.spacing = g.dx() / static_cast<double>(options.oversample);
  const std::size_t count = options.oversample * (g.n() - 1) + 1;
  const auto Sx = stencil_derivative(S0, 1);
  std::vector<Particle> fan_state(count);
  fan.x0.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double x0 = g.x_min() + static_cast<double>(j) * fan.spacing;
    fan.x0[j] = x0;
    fan_state[j] = {x0, interpolate_uniform(Sx.values(), g.x_min(), g.dx(), x0),
                    interpolate_uniform(S0.values(), g.x_min(), g.dx(), x0)};
  }

  std::vector<double> xs(count), J_prev;
  auto snapshot = [&](double t, const std::vector<double>& J) {
    FanSnapshot s;
    s.t = t;
    s.x.reserve(count);
    s.p.reserve(count);
    s.S.reserve(count);
    for (const auto& c : fan_state) {
      s.x.push_back(c.r);
      s.p.push_back(c.p);
      s.S.push_back(c.S);
    }
    s.J = J;
    fan.snapshots.push_back(std::move(s));
  };
  for (std::size_t j = 0; j < count; ++j) xs[j] = fan_state[j].r;
  J_prev = fan_jacobian(xs, fan.spacing);
  snapshot(0.0, J_prev);

  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * h;
    for (auto& c : fan_state) symplectic_step(V, c, t, h);
    for (std::size_t j = 0; j < count; ++j) xs[j] = fan_state[j].r;
    auto J = fan_jacobian(xs, fan.spacing);
    if (!fan.caustic_time) {
      const auto worst = static_cast<std::size_t>(std::min_element(J.begin(), J.end()) -
                                                  J.begin());
      if (J[worst] <= 0.0) {
        const double a = J_prev[worst];
        const double frac = a > 0.0 ? a / (a - J[worst]) : 0.0;
        fan.caustic_time = t + frac * h;
      }
    }
    const bool last = s + 1 == steps;
    if (last || (s + 1) % options.snapshot_every == 0) {
      snapshot(last ? t_final : t + h, J);
    }
    J_prev = std::move(J);
  }
  return fan;
}

HjSolution solve_hj(const RealField& S0, const PotentialSpec& V, double t_final,
                    const FanOptions& options) {
  const Grid& g = S0.grid();
  HjSolution sol;
  sol.fan = trace_characteristics(S0, V, t_final, options);
  const auto t_c = sol.fan.caustic_time;
  for (const auto& snap : sol.fan.snapshots) {
    if (t_c && snap.t >= *t_c) break;
    std::vector<double> S(g.n());
    std::vector<char> cov(g.n());
    const double lo = snap.x.front();
    const double hi = snap.x.back();
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double x = g.x(i);
      if (x < lo) {
        S[i] = snap.S.front() + snap.p.front() * (x - lo);
      } else if (x > hi) {
        S[i] = snap.S.back() + snap.p.back() * (x - hi);
      } else {
        S[i] = hermite_interpolate(snap.x, snap.S, snap.p, x);
        cov[i] = 1;
      }
    }
    sol.times.push_back(snap.t);
    sol.S.emplace_back(g, std::move(S));
    sol.covered.push_back(std::move(cov));
  }
  if (t_c) {
    std::vector<FanSnapshot> kept(sol.fan.snapshots.begin(),
                                  sol.fan.snapshots.begin() +
                                      static_cast<std::ptrdiff_t>(sol.times.size()));
    sol.fan.snapshots = std::move(kept);
    throw HjCausticError("solve_hj: characteristics cross at t = " + fmt(*t_c) +
                             "; the action is multivalued beyond it",
                         *t_c, std::move(sol));
  }
  return sol;
}

double hj_solution_residual(const HjSolution& sol, std::size_t k, const PotentialSpec& V) {
  const std::size_t n = sol.times.size();
  if (k >= n || n < 3) throw DomainError("hj_solution_residual: need 3 snapshots around k");
  const Grid& g = sol.S[k].grid();
  const std::size_t width = std::min<std::size_t>(5, n);
  const std::size_t first = std::min(k >= width / 2 ? k - width / 2 : 0, n - width);
  const std::vector<double> window(sol.times.begin() + static_cast<std::ptrdiff_t>(first),
                                   sol.times.begin() + static_cast<std::ptrdiff_t>(first + width));
  const auto w = fornberg_weights(sol.times[k], window, 1)[1];
  auto covered = [&](std::size_t i) {
    for (std::size_t q = first; q < first + width; ++q) {
      if (!sol.covered[q][i]) return false;
    }
    return true;
  };
  std::size_t b = 0;
  while (b < g.n() && !covered(b)) ++b;
  std::size_t e = b;
  while (e < g.n() && covered(e)) ++e;
  if (e - b < kStencilWidth) throw DomainError("hj_solution_residual: too few covered nodes");

  const auto Sx = stencil_derivative(sol.S[k].values(), g.dx(), 1, b, e);
  const double m = V.mass();
  double acc = 0.0;
  for (std::size_t i = b; i < e; ++i) {
    double St = 0.0;
    for (std::size_t q = 0; q < width; ++q) St += w[q] * sol.S[first + q][i];
    const double sx = Sx[i - b];
    const double r = St + sx * sx / (2.0 * m) + eval_potential(V, g.x(i), sol.times[k]);
    acc += r * r;
  }
  return std::sqrt(acc * g.dx());
}

RealField transport_density(const RealField& rho0, const CharacteristicFan& fan, double t) {
  const auto& snap = fan.at(t);
  const Grid& g = rho0.grid();
  const std::size_t count = snap.x.size();
  std::vector<double> carried(count);
  double peak = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    carried[j] = std::max(0.0, interpolate_uniform(rho0.values(), g.x_min(), g.dx(), fan.x0[j]));
    peak = std::max(peak, carried[j]);
  }
  // Characteristics whose launch density is negligible do not matter.
  std::size_t lo = 0, hi = count;
  while (lo < count && carried[lo] <= 1e-14 * peak) ++lo;
  while (hi > lo && carried[hi - 1] <= 1e-14 * peak) --hi;
  lo = lo > 2 ? lo - 2 : 0;
  hi = std::min(count, hi + 2);
  if (hi - lo < 4) throw DomainError("transport_density: initial density is empty");

  const double sign = snap.J[lo] > 0.0 ? 1.0 : -1.0;
  for (std::size_t j = lo; j < hi; ++j) {
    if (!(sign * snap.J[j] > 1e-6)) {
      throw CausticError("transport_density: the characteristic map is not injective at t = " +
                             fmt(t),
                         fan.caustic_time.value_or(t));
    }
  }
  const std::size_t used = hi - lo;
  std::vector<double> xs(used), ys(used);
  for (std::size_t j = 0; j < used; ++j) {
    const std::size_t src = sign > 0 ? lo + j : hi - 1 - j;
    xs[j] = snap.x[src];
    ys[j] = carried[src] / std::abs(snap.J[src]);
  }
  std::vector<double> rho(g.n(), 0.0);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    if (x < xs.front() || x > xs.back()) continue;
    rho[i] = std::max(0.0, lagrange4(xs, ys, x));
  }
  return RealField(g, std::move(rho));
}

RealField momentum_field(const RealField& S) { return stencil_derivative(S, 1); }

ContinuityTerms deterministic_continuity_check(double epsilon, const RealField& S, double r,
                                               double p, std::size_t nodes) {
  if (!(epsilon > 0.0)) throw DomainError("deterministic_continuity_check: epsilon must be > 0");
  const Grid& g = S.grid();
  const auto Sx = stencil_derivative(S, 1);
  const auto Sxx = stencil_derivative(S, 2);
  const auto rule = gauss_hermite(nodes);
  const double root = std::sqrt(epsilon);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  ContinuityTerms out;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double y = root * rule.nodes[q];
    const double x = r + y;
    if (x < g.x_min() || x > g.x_max() - g.dx()) {
      throw DomainError("deterministic_continuity_check: packet leaves the grid");
    }
    const double w = rule.weights[q] * norm;
    const double mismatch = y * (p - interpolate_uniform(Sx.values(), g.x_min(), g.dx(), x));
    out.term1 += w * mismatch;
    out.term1_abs += w * std::abs(mismatch);
    out.term2 += w * interpolate_uniform(Sxx.values(), g.x_min(), g.dx(), x);
  }
  out.term2 *= 0.5 * epsilon;
  return out;
}

std::vector<ContinuityTerms> deterministic_continuity_check(double epsilon,
                                                            const std::vector<RealField>& S,
                                                            std::span<const double> r,
                                                            std::span<const double> p) {
  if (S.size() != r.size() || S.size() != p.size()) {
    throw DomainError("deterministic_continuity_check: series lengths differ");
  }
  std::vector<ContinuityTerms> out;
  for (std::size_t k = 0; k < S.size(); ++k) {
    out.push_back(deterministic_continuity_check(epsilon, S[k], r[k], p[k]));
  }
  return out;
}

NewtonProjection projected_newton_check(const std::vector<double>& times,
                                        const std::vector<RealField>& S,
                                        std::span<const double> r, const PotentialSpec& V) {
  const std::size_t n = times.size();
  if (S.size() != n || r.size() != n) throw DomainError("projected_newton_check: size mismatch");
  if (n < 5) throw DomainError("projected_newton_check: need at least 5 snapshots");
  if (!uniform_times(times)) throw DomainError("projected_newton_check: non-uniform snapshots");
  const double step = times[1] - times[0];
  const Grid& g = S[0].grid();
  std::vector<RealField> Sx, Sxx;
  for (const auto& s : S) {
    Sx.push_back(stencil_derivative(s, 1));
    Sxx.push_back(stencil_derivative(s, 2));
  }
  auto at = [&](const RealField& f, double x) {
    return interpolate_uniform(f.values(), g.x_min(), g.dx(), x);
  };
  const double m = V.mass();
  NewtonProjection out;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double x = r[k];
    const double dt_px = (at(Sx[k - 2], x) - 8.0 * at(Sx[k - 1], x) + 8.0 * at(Sx[k + 1], x) -
                          at(Sx[k + 2], x)) /
                         (12.0 * step);
    const double lhs = dt_px + at(Sx[k], x) / m * at(Sxx[k], x);
    const double rhs = eval_force(V, x, times[k]);
    out.times.push_back(times[k]);
    out.lhs.push_back(lhs);
    out.rhs.push_back(rhs);
    out.residual.push_back(std::abs(lhs - rhs));
  }
  return out;
}

Expectations expectations(const RealField& rho, const RealField& S) {
  if (!(rho.grid() == S.grid())) throw DomainError("expectations: grid mismatch");
  const Grid& g = rho.grid();
  const double mass = integrate(rho);
  if (std::abs(mass - 1.0) > 1e-6) throw DomainError("expectations: density is not normalized");
  const auto Sx = stencil_derivative(S, 1);
  Expectations e;
  for (std::size_t i = 0; i < g.n(); ++i) {
    e.x_mean += g.x(i) * rho[i];
    e.p_mean += rho[i] * Sx[i];
  }
  e.x_mean *= g.dx();
  e.p_mean *= g.dx();
  return e;
}

}  // namespace sclab
