#include "sclab/lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "sclab/classical.hpp"
#include "sclab/detpot.hpp"
#include "sclab/madelung.hpp"
#include "sclab/numerics.hpp"
#include "sclab/phj.hpp"
#include "sclab/schrodinger.hpp"

namespace sclab::lab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// ln(rho) derivatives below this relative density are FFT round-off.
constexpr double kResidualFloor = 1e-6;
constexpr double kNeighbourFloor = 1e-8;

std::string indexed(const std::string& key, std::size_t i) { return key + "." + std::to_string(i); }

/// Runs f(0..n-1), at most `threads` at a time, and returns results in index
/// order whatever the completion order.
template <class F>
auto run_indexed(std::size_t n, std::size_t threads, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out;
  out.reserve(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
    return out;
  }
  for (std::size_t start = 0; start < n; start += threads) {
    std::vector<std::future<R>> wave;
    for (std::size_t i = start; i < std::min(n, start + threads); ++i) {
      wave.push_back(std::async(std::launch::async, f, i));
    }
    for (auto& fut : wave) out.push_back(fut.get());
  }
  return out;
}

struct PacketRun {
  std::vector<std::vector<double>> rows;
  std::vector<FieldDump> fields;
  std::size_t residual_gaps = 0;  ///< snapshots where the Madelung fields were undefined
};

struct Residuals {
  double quantum_term = kNaN;
  double classical = kNaN;
  double quantum = kNaN;
};

WaveFunction with_values(const WaveFunction& like, std::vector<complex> v, double t) {
  return WaveFunction(ComplexField(like.grid(), std::move(v)), like.hbar(), like.mass(), t);
}

/// QHJ and classical HJ residuals at psi's time. S_t is a centred difference
/// over one step of size h each way; the backward state uses time reversal,
/// psi(t - h) = conj(U(h) conj psi(t)), which is exact for static V.
std::optional<Residuals> hj_residuals(const WaveFunction& psi, const PotentialSpec& V,
                                      const Propagator& small, double t) {
  const double h = small.dt();
  std::vector<complex> fwd(psi.field().values().begin(), psi.field().values().end());
  std::vector<complex> bwd(fwd.size());
  std::transform(fwd.begin(), fwd.end(), bwd.begin(), [](complex z) { return std::conj(z); });
  small.step(fwd, t);
  small.step(bwd, t);
  for (auto& z : bwd) z = std::conj(z);
  try {
    const auto mid = to_madelung(psi, kResidualFloor);
    const auto after = to_madelung(with_values(psi, std::move(fwd), t + h), kNeighbourFloor, &mid);
    const auto before = to_madelung(with_values(psi, std::move(bwd), t - h), kNeighbourFloor, &mid);
    if (std::max(after.support_begin(), before.support_begin()) > mid.support_begin() ||
        std::min(after.support_end(), before.support_end()) < mid.support_end()) {
      return std::nullopt;
    }
    const auto St = action_rate(before, after, 2.0 * h);
    Residuals r;
    r.quantum_term = quantum_term_norm(mid, V.mass());
    r.classical = hj_residual(mid, St, V, HjMode::Classical, t);
    r.quantum = hj_residual(mid, St, V, HjMode::Quantum, t);
    return r;
  } catch (const NodeError&) {
    return std::nullopt;
  }
}

FieldDump dump_fields(const WaveFunction& psi, std::size_t run, std::size_t snapshot, double t) {
  FieldDump d;
  d.run = run;
  d.snapshot = snapshot;
  d.t = t;
  const Grid& g = psi.grid();
  d.x = g.points();
  for (std::size_t i = 0; i < g.n(); ++i) d.rho.push_back(std::norm(psi.field()[i]));
  try {
    const auto f = to_madelung(psi);
    d.S.assign(f.S().values().begin(), f.S().values().end());
  } catch (const NodeError&) {
    for (std::size_t i = 0; i < g.n(); ++i) d.S.push_back(psi.hbar() * std::arg(psi.field()[i]));
  }
  return d;
}

/// Steps per snapshot interval: from numerics.dt when set (it must divide
/// the interval), else the fewest steps within 90% of the stable step.
std::size_t steps_per_interval(const RunConfig& cfg, double interval, double limit) {
  if (cfg.dt > 0.0) {
    const double s = std::round(interval / cfg.dt);
    if (s < 1.0 || std::abs(s * cfg.dt - interval) > 1e-9 * interval) {
      throw ConfigError("config: numerics.dt must divide t_final / snapshots");
    }
    return static_cast<std::size_t>(s);
  }
  if (std::isinf(limit)) return 1;
  return static_cast<std::size_t>(std::ceil(interval / (0.9 * limit)));
}

PacketRun simulate_packet(const RunConfig& cfg, const PotentialSpec& V, const Grid& g,
                          std::size_t run, double hbar, double epsilon, bool residuals) {
  const double m = V.mass();
  WaveFunction psi = init_gaussian(g, epsilon, cfg.r0, cfg.p0, hbar, m);
  const double interval = cfg.t_final / static_cast<double>(cfg.snapshots);
  const std::size_t steps = steps_per_interval(cfg, interval, max_stable_step(g, V, hbar));
  const double dt = interval / static_cast<double>(steps);
  const Propagator prop(g, V, hbar, dt);
  const Propagator small(g, V, hbar, std::min(dt, 1e-3));

  PacketRun out;
  PhasePoint z{cfg.r0, cfg.p0};
  double t_newton = 0.0;
  for (std::size_t k = 0; k <= cfg.snapshots; ++k) {
    const double t = static_cast<double>(k) * interval;
    if (k > 0) {
      psi = prop.advance(psi, steps);
      for (std::size_t s = 0; s < steps; ++s) {
        z = verlet_step(V, z, t_newton, dt);
        t_newton += dt;
      }
    }
    const auto o = observables(psi);
    Residuals r;
    if (residuals) {
      if (auto got = hj_residuals(psi, V, small, t)) {
        r = *got;
      } else {
        ++out.residual_gaps;
      }
    }
    out.rows.push_back({static_cast<double>(run), hbar, epsilon, t, o.x_mean, o.p_mean, o.var_x,
                        o.var_p, o.uncertainty_product, o.width, o.kurtosis_excess,
                        r.quantum_term, r.classical, r.quantum, z.r, std::abs(o.x_mean - z.r)});
    if (cfg.dump_fields) out.fields.push_back(dump_fields(psi, run, k, t));
  }
  return out;
}

void merge(RunRecord& rec, std::vector<PacketRun>& runs) {
  std::size_t gaps = 0;
  for (auto& r : runs) {
    for (auto& row : r.rows) rec.rows.push_back(std::move(row));
    for (auto& f : r.fields) rec.fields.push_back(std::move(f));
    gaps += r.residual_gaps;
  }
  rec.add_result("residual_gaps", std::to_string(gaps));
}

double max_finite(const std::vector<double>& v) {
  double m = kNaN;
  for (double x : v) {
    if (std::isfinite(x) && !(x <= m)) m = x;
  }
  return m;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::string detpot_verdict(const PotentialSpec& V, const Grid& g, double tol,
                           std::optional<double>* exponent) {
  try {
    const auto rep = classify(V, g, default_epsilons(g), tol);
    if (exponent) *exponent = rep.scaling_exponent;
    return to_string(rep.verdict);
  } catch (const Error& e) {
    return std::string("unavailable (") + e.what() + ")";
  }
}

}  // namespace

RunRecord run_standard_limit(const RunConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  const auto V = make_potential(cfg);
  const auto g = config_grid(cfg);
  auto runs = run_indexed(cfg.hbar_list.size(), cfg.threads, [&](std::size_t i) {
    return simulate_packet(cfg, V, g, i, cfg.hbar_list[i], cfg.epsilon, true);
  });
  merge(rec, runs);

  std::vector<double> q0;
  for (std::size_t i = 0; i < cfg.hbar_list.size(); ++i) {
    const auto q = rec.column("quantum_term_norm", i);
    q0.push_back(q.front());
    rec.add_result(indexed("quantum_term_initial", i), q.front());
    rec.add_result(indexed("quantum_term_max", i), max_finite(q));
  }
  for (std::size_t i = 0; i < q0.size(); ++i) {
    rec.add_result(indexed("quantum_term_ratio", i), q0[i] / q0[0]);
  }
  rec.add_result("quantum_term_exponent", fit_loglog_slope(cfg.hbar_list, q0));
  // The classical HJ residual of a quantum state is exactly the quantum term.
  const auto q = rec.column("quantum_term_norm");
  const auto c = rec.column("hj_residual_classical");
  std::vector<double> gap;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::isfinite(q[i]) && std::isfinite(c[i]) && q[i] > 0.0) gap.push_back(std::abs(c[i] / q[i] - 1.0));
  }
  rec.add_result("classical_gap_max", max_finite(gap));
  return rec;
}

RunRecord run_deterministic_limit(const RunConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  const auto V = make_potential(cfg);
  const auto g = config_grid(cfg);
  auto runs = run_indexed(cfg.epsilon_list.size(), cfg.threads, [&](std::size_t i) {
    return simulate_packet(cfg, V, g, i, cfg.hbar, cfg.epsilon_list[i], true);
  });
  merge(rec, runs);

  const double m = cfg.mass;
  std::vector<double> A, ratio, coupling;
  for (std::size_t i = 0; i < cfg.epsilon_list.size(); ++i) {
    const double eps = cfg.epsilon_list[i];
    A.push_back(rec.column("width", i).back());
    ratio.push_back(A.back() / eps);
    // Coupling term of the delta ansatz, (hbar^2 / 2m eps^2)(eps - (x - r)^2),
    // at its largest magnitude on the grid.
    double cmax = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double y = g.x(j) - cfg.r0;
      cmax = std::max(cmax, cfg.hbar * cfg.hbar / (2 * m * eps * eps) * std::abs(eps - y * y));
    }
    coupling.push_back(cmax);
    rec.add_result(indexed("width_final", i), A.back());
    rec.add_result(indexed("width_ratio", i), ratio.back());
    rec.add_result(indexed("coupling_max", i), cmax);
  }
  rec.add_result("width_ratio_exponent", fit_loglog_slope(cfg.epsilon_list, ratio));
  rec.add_result("width_exponent", fit_loglog_slope(cfg.epsilon_list, A));
  rec.add_result("coupling_exponent", fit_loglog_slope(cfg.epsilon_list, coupling));
  return rec;
}

RunRecord run_combined_limit(const RunConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  const auto V = make_potential(cfg);
  const auto g = config_grid(cfg);
  auto runs = run_indexed(cfg.hbar_list.size(), cfg.threads, [&](std::size_t i) {
    const double hbar = cfg.hbar_list[i];
    return simulate_packet(cfg, V, g, i, hbar, cfg.k * hbar, false);
  });
  merge(rec, runs);

  std::vector<double> dev, wmax;
  for (std::size_t i = 0; i < cfg.hbar_list.size(); ++i) {
    dev.push_back(max_finite(rec.column("trajectory_deviation", i)));
    wmax.push_back(max_finite(rec.column("width", i)));
    rec.add_result(indexed("deviation_max", i), dev.back());
    rec.add_result(indexed("width_max", i), wmax.back());
    rec.add_result(indexed("kurtosis_max", i), max_abs(rec.column("kurtosis_excess", i)));
  }
  // Round-off sets a floor on the deviation once it is already tiny.
  bool dev_monotone = true, width_monotone = true;
  for (std::size_t i = 1; i < dev.size(); ++i) {
    dev_monotone = dev_monotone && dev[i] <= dev[i - 1] + 1e-9;
    width_monotone = width_monotone && wmax[i] < wmax[i - 1];
  }
  rec.add_result("deviation_monotone", yes_no(dev_monotone));
  rec.add_result("width_monotone", yes_no(width_monotone));

  const auto degree = V.polynomial_degree();
  rec.add_result("potential_degree", degree ? std::to_string(*degree) : std::string("n/a"));
  std::optional<double> exponent;
  // The verdict concerns V alone; a finer grid resolves the narrowest kernel.
  const Grid fine = sclab::make_grid(cfg.x_min, cfg.x_max, std::max<std::size_t>(cfg.n, 2048));
  rec.add_result("detpot_verdict", detpot_verdict(V, fine, cfg.detpot_tol, &exponent));
  if (exponent) rec.add_result("detpot_scaling_exponent", *exponent);
  return rec;
}

RunRecord run_uncertainty(const RunConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  const auto V = make_potential(cfg);
  const auto g = config_grid(cfg);
  const std::vector<double> hbars = cfg.hbar_list.empty() ? std::vector<double>{cfg.hbar} : cfg.hbar_list;
  auto runs = run_indexed(hbars.size(), cfg.threads, [&](std::size_t i) {
    return simulate_packet(cfg, V, g, i, hbars[i], cfg.epsilon, true);
  });
  merge(rec, runs);

  std::vector<double> mins;
  bool holds = true;
  for (std::size_t i = 0; i < hbars.size(); ++i) {
    const auto u = rec.column("uncertainty_product", i);
    const double lo = *std::min_element(u.begin(), u.end());
    mins.push_back(lo);
    const double ratio = lo / (hbars[i] / 2);
    holds = holds && ratio >= 1.0 - 1e-6;
    rec.add_result(indexed("min_product", i), lo);
    rec.add_result(indexed("floor_ratio", i), ratio);
  }
  rec.add_result("floor_holds", yes_no(holds));
  if (hbars.size() >= 3) rec.add_result("min_product_exponent", fit_loglog_slope(hbars, mins));
  return rec;
}

RunRecord run_detpot(const RunConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  rec.kind = RecordKind::Detpot;
  const auto V = make_potential(cfg);
  const auto g = config_grid(cfg);
  const auto eps = cfg.epsilon_list.empty() ? default_epsilons(g) : cfg.epsilon_list;
  const auto rep = classify(V, g, eps, cfg.detpot_tol);
  for (const auto& r : rep.rows) rec.rows.push_back({r.epsilon, r.residual, r.fourier_window_norm});
  rec.add_result("potential", rep.potential);
  rec.add_result("verdict", to_string(rep.verdict));
  rec.add_result("tol", rep.tol);
  if (rep.scaling_exponent) rec.add_result("scaling_exponent", *rep.scaling_exponent);
  rec.add_result("second_derivative_norm", rep.second_derivative_norm);
  for (std::size_t i = 0; i < rep.notes.size(); ++i) rec.add_result(indexed("note", i), rep.notes[i]);
  return rec;
}

RunRecord run_phj_demo(const RunConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  rec.kind = RecordKind::Phj;
  const auto V = make_potential(cfg);
  const auto g = config_grid(cfg);
  const double m = cfg.mass;
  const auto S0 = RealField::sample(g, [&](double x) {
    const double y = x - cfg.r0;
    return cfg.p0 * x - (cfg.focal_time > 0.0 ? m * y * y / (2 * cfg.focal_time) : 0.0);
  });
  auto rho0 = RealField::sample(g, [&](double x) {
    const double y = x - cfg.r0;
    return std::exp(-y * y / cfg.epsilon);
  });
  const double mass0 = integrate(rho0);
  std::vector<double> scaled(rho0.values().begin(), rho0.values().end());
  for (auto& v : scaled) v /= mass0;
  rho0 = RealField(g, std::move(scaled));

  FanOptions opt;
  opt.oversample = cfg.oversample;
  if (cfg.dt > 0.0) opt.dt = cfg.dt;
  const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_final / opt.dt - 1e-9));
  const double h = cfg.t_final / static_cast<double>(n_steps);
  // Every step is kept so that S_t comes from closely spaced snapshots; rows
  // are written at the requested stride.
  opt.snapshot_every = 1;
  const std::size_t stride = std::max<std::size_t>(1, n_steps / cfg.snapshots);

  const auto sol = solve_hj(S0, V, cfg.t_final, opt);
  const auto newton = newton_integrate(V, cfg.r0, cfg.p0, h, n_steps);
  double dev = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    if (k % stride != 0 && k + 1 != sol.times.size()) continue;
    const double t = sol.times[k];
    const auto rho = transport_density(rho0, sol.fan, t);
    const auto e = expectations(rho, sol.S[k]);
    const auto j = std::min(newton.size() - 1, static_cast<std::size_t>(std::llround(t / h)));
    const auto& snap = sol.fan.at(t);
    const double jmin = *std::min_element(snap.J.begin(), snap.J.end());
    const double res = hj_solution_residual(sol, k, V);
    rec.rows.push_back({t, e.x_mean, e.p_mean, newton.r[j], newton.p[j], jmin, res});
    dev = std::max(dev, std::abs(e.x_mean - newton.r[j]));
    worst = std::max(worst, res);
  }
  rec.add_result("caustic_time", sol.fan.caustic_time ? format_double(*sol.fan.caustic_time)
                                                      : std::string("none"));
  rec.add_result("hj_residual_max", worst);
  rec.add_result("deviation_max", dev);
  return rec;
}

RunRecord run_liouville_demo(const RunConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  rec.kind = RecordKind::Liouville;
  const auto V = make_potential(cfg);
  const double dt = cfg.dt > 0.0 ? cfg.dt : 1e-2;
  const auto [ax, ap] =
      fit_phase_axes(V, cfg.r0, cfg.p0, cfg.sigma_x, cfg.sigma_p, cfg.t_final, cfg.phase_n);
  const auto rho0 = PhaseDensity::gaussian(ax, ap, cfg.r0, cfg.p0, cfg.sigma_x, cfg.sigma_p);
  const double interval = cfg.t_final / static_cast<double>(cfg.snapshots);
  const auto steps = static_cast<std::size_t>(std::ceil(interval / dt - 1e-9));
  const double h = interval / static_cast<double>(steps);

  PhasePoint z{cfg.r0, cfg.p0};
  double t_newton = 0.0, drift = 0.0;
  for (std::size_t k = 0; k <= cfg.snapshots; ++k) {
    const double t = static_cast<double>(k) * interval;
    if (k > 0) {
      for (std::size_t s = 0; s < steps; ++s) {
        z = verlet_step(V, z, t_newton, h);
        t_newton += h;
      }
    }
    const auto rho = k == 0 ? rho0 : liouville_evolve(rho0, V, t, dt);
    const auto c = rho.centroid();
    drift = std::max(drift, std::abs(rho.mass() / rho0.mass() - 1.0));
    rec.rows.push_back({t, c.r, c.p, rho.mass(), rho.l1_distance(rho0), z.r, z.p});
  }

  // Delta ansatz along Newton trajectories drawn from the blob.
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> dx(cfg.r0, cfg.sigma_x), dp(cfg.p0, cfg.sigma_p);
  double delta = 0.0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const double r = dx(rng), p = dp(rng);
    delta = std::max(delta, delta_ansatz_check(V, r, p, cfg.t_final));
  }
  rec.add_result("delta_ansatz_residual", delta);
  rec.add_result("mass_drift_max", drift);
  rec.add_result("l1_final", rec.rows.back()[4]);
  return rec;
}

RunRecord run_experiment(const RunConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  const std::string& e = cfg.experiment;
  if (e == "standard_limit") rec = run_standard_limit(cfg);
  else if (e == "deterministic_limit") rec = run_deterministic_limit(cfg);
  else if (e == "combined_limit") rec = run_combined_limit(cfg);
  else if (e == "uncertainty") rec = run_uncertainty(cfg);
  else if (e == "detpot") rec = run_detpot(cfg);
  else if (e == "phj_demo") rec = run_phj_demo(cfg);
  else rec = run_liouville_demo(cfg);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace sclab::lab
