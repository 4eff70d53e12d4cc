#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sclab/errors.hpp"
#include "sclab/madelung.hpp"
#include "sclab/numerics.hpp"

using namespace sclab;

namespace {

double fidelity(const WaveFunction& a, const WaveFunction& b) {
  complex s = 0.0;
  const auto va = a.field().values();
  const auto vb = b.field().values();
  for (std::size_t i = 0; i < va.size(); ++i) s += std::conj(va[i]) * vb[i];
  return std::abs(s) * a.grid().dx();
}

// Madelung fields at t - dt, t, t + dt, anchored consistently in time.
struct Triple {
  MadelungFields before, mid, after;
};

Triple snapshots(const WaveFunction& psi0, const PotentialSpec& V, double dt, std::size_t steps,
                 double floor) {
  Propagator prop(psi0.grid(), V, psi0.hbar(), dt);
  const auto a = prop.advance(psi0, steps);
  const auto b = prop.advance(a, 1);
  const auto c = prop.advance(b, 1);
  auto fa = to_madelung(a, floor);
  auto fb = to_madelung(b, floor, &fa);
  auto fc = to_madelung(c, floor, &fb);
  return {fa, fb, fc};
}

MadelungFields analytic_fields(const GaussianSolution& s, const Grid& g, double t) {
  return MadelungFields(s.density_field(g, t), s.action_field(g, t), s.params().hbar);
}

}  // namespace

TEST_CASE("to_madelung examples") {
  const Grid g = make_grid(-10, 10, 512);
  const auto f = to_madelung(init_gaussian(g, 0.5, 0.0, 2.0, 1.0, 1.0));
  const auto Sx = stencil_derivative(f.S().values(), g.dx(), 1, f.support_begin(), f.support_end());
  for (double v : Sx) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f.masked_fraction() > 0.2);  // the 20% limit would reject this packet

  const auto still = to_madelung(init_gaussian(g, 0.5, 0.0, 0.0, 1.0, 1.0));
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(still.S()[i] == 0.0);

  std::vector<complex> excited(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    excited[i] = std::sqrt(2.0) * std::pow(std::numbers::pi, -0.25) * x * std::exp(-x * x / 2);
  }
  const WaveFunction node(ComplexField(g, excited), 1.0, 1.0);
  CHECK_THROWS_AS(to_madelung(node), NodeError);
}

TEST_CASE("phase jump of pi between neighbours is rejected") {
  const Grid g = make_grid(-10, 10, 512);
  std::vector<complex> v(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double x = g.x(i) + 0.5 * g.dx();  // node between grid points
    v[i] = std::sqrt(2.0) * std::pow(std::numbers::pi, -0.25) * x * std::exp(-x * x / 2);
  }
  const WaveFunction odd(ComplexField(g, v), 1.0, 1.0);
  CHECK_THROWS_AS(to_madelung(odd), NodeError);
}

TEST_CASE("from_madelung examples") {
  const Grid g = make_grid(-10, 10, 512);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto psi = init_gaussian(g, 0.5 + 0.4 * (u(rng) + 1), u(rng), 3 * u(rng), 1.0, 1.0);
    const auto back = from_madelung(to_madelung(psi), 1.0);
    CHECK(fidelity(psi, back) >= 1.0 - 1e-10);
  }

  const Grid box = make_grid(0, 4, 64);
  const MadelungFields flat(RealField(box, std::vector<double>(64, 0.25)), RealField::zeros(box), 1.0);
  const auto psi = from_madelung(flat, 1.0);
  for (std::size_t i = 0; i < box.n(); ++i) {
    CHECK(psi.field()[i].real() == doctest::Approx(0.5));
    CHECK(psi.field()[i].imag() == 0.0);
  }
  CHECK_THROWS_AS(MadelungFields(RealField(box, std::vector<double>(64, 0.3)),
                                 RealField::zeros(box), 1.0),
                  DomainError);
}

TEST_CASE("analytic combined-limit state propagates like the analytic family") {
  const Grid g = make_grid(-15, 15, 512);
  // eps = k hbar with k = 0.6 / (m omega), harmonic.
  const GaussianSolution exact({PacketCase::Harmonic, 0.3, 0.5, 0.8, 0.5, 1.0, 1.0, 0.0});
  const auto psi0 = from_madelung(analytic_fields(exact, g, 0.0), 1.0);
  const double dt = 2.0 / 8000;
  const auto psi = propagate(psi0, exact.potential(), dt, 8000);
  const auto o = observables(psi);
  CHECK(o.width == doctest::Approx(exact.width(2.0)).epsilon(1e-4));
  CHECK(std::abs(o.x_mean - exact.position(2.0)) <= 1e-4);
  CHECK(fidelity(psi, exact.wavefunction(g, 2.0)) >= 1.0 - 1e-8);
}

TEST_CASE("quantum term examples") {
  const Grid g = make_grid(-10, 10, 512);
  const double eps = 0.7, r = 0.4, hbar = 1.3, m = 2.0;
  const auto rho = RealField::sample(g, [&](double x) {
    return std::exp(-(x - r) * (x - r) / eps) / std::sqrt(std::numbers::pi * eps);
  });
  const auto q = quantum_term(rho, hbar, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (q[i] == 0.0) continue;  // masked
    const double y = g.x(i) - r;
    const double want = hbar * hbar / (2 * m * eps * eps) * (eps - y * y);
    worst = std::max(worst, std::abs(q[i] - want));
  }
  CHECK(worst <= 1e-8);
  const auto peak = quantum_term(RealField::sample(g, [&](double x) {
    return std::exp(-x * x / eps) / std::sqrt(std::numbers::pi * eps);
  }), hbar, m);
  CHECK(peak[256] == doctest::Approx(hbar * hbar / (2 * m * eps)).epsilon(1e-10));

  const Grid box = make_grid(0, 4, 64);
  const RealField flat(box, std::vector<double>(64, 0.25));
  const auto q_flat = quantum_term(flat, 1.0, 1.0);
  for (double v : q_flat.values()) CHECK(std::abs(v) <= 1e-10);
  const auto q_zero = quantum_term(rho, 0.0, 1.0);
  for (double v : q_zero.values()) CHECK(v == 0.0);

  const auto q2 = quantum_term(rho, 2 * hbar, m);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(q2[i] == 4.0 * q[i]);
}

TEST_CASE("continuity residual examples") {
  const Grid g = make_grid(-15, 15, 512);
  const auto V = PotentialSpec::harmonic(1, 1);
  const auto psi0 = init_gaussian(g, 0.6, 0.5, 0.7, 1.0, 1.0);
  const double dt = 3e-4;
  REQUIRE(dt <= max_stable_step(g, V, 1.0));
  Propagator prop(g, V, 1.0, dt);
  const auto a = prop.advance(psi0, 1000);
  const auto b = prop.advance(a, 1);
  const auto fa = to_madelung(a);
  const auto fb = to_madelung(b, kDensityFloor, &fa);
  const double base = continuity_residual(fa, fb, dt, 1.0);
  CHECK(base <= 1e-3);

  const Grid box = make_grid(-5, 5, 128);
  const auto rho = RealField::sample(box, [](double x) {
    return std::exp(-x * x) / std::sqrt(std::numbers::pi);
  });
  const MadelungFields rest(rho, RealField::zeros(box), 1.0);
  CHECK(continuity_residual(rest, rest, 0.01, 1.0) <= 1e-12);

  // Doubling S doubles the flux, so the residual becomes the transport term.
  std::vector<double> s2a(g.n()), s2b(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    s2a[i] = 2 * fa.S()[i];
    s2b[i] = 2 * fb.S()[i];
  }
  const MadelungFields ca(fa.rho(), RealField(g, s2a), 1.0);
  const MadelungFields cb(fb.rho(), RealField(g, s2b), 1.0);
  const double corrupted = continuity_residual(ca, cb, dt, 1.0);
  // Transport term alone: residual with rho held fixed at the midpoint.
  std::vector<double> rho_mid(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) rho_mid[i] = 0.5 * (fa.rho()[i] + fb.rho()[i]);
  const MadelungFields ta(RealField(g, rho_mid), fa.S(), 1.0);
  const MadelungFields tb(RealField(g, rho_mid), fb.S(), 1.0);
  const double transport = continuity_residual(ta, tb, dt, 1.0);
  CHECK(corrupted > 100 * base);
  CHECK(corrupted == doctest::Approx(transport).epsilon(0.01));
}

TEST_CASE("continuity residual is second order in dt") {
  // The residual is |time error + spatial error|. The spatial part is
  // measured at a tiny step and removed in quadrature before the slope fit.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = make_grid(-15, 15, 512);
  for (int trial = 0; trial < 4; ++trial) {
    const auto kind = static_cast<PacketCase>(trial % 3);
    GaussianParams q{kind, 0.4 + u(rng), 0.5 * u(rng), u(rng), 0.5 + u(rng), 1.0, 0.7 + u(rng), u(rng) - 0.5};
    const GaussianSolution s(q);
    const auto V = s.potential();
    const auto psi0 = init_gaussian(g, q.epsilon0, q.r0, q.p0, q.hbar, q.mass);
    const double dt0 = std::min(max_stable_step(g, V, q.hbar), 4e-3);
    auto residual = [&](double dt) {
      Propagator prop(g, V, q.hbar, dt);
      const auto a = prop.advance(psi0, static_cast<std::size_t>(std::llround(0.5 / dt)));
      const auto b = prop.advance(a, 1);
      const auto fa = to_madelung(a);
      return continuity_residual(fa, to_madelung(b, kDensityFloor, &fa), dt, q.mass);
    };
    const double floor = residual(dt0 / 32);
    std::vector<double> steps{dt0, dt0 / 2}, res;
    for (double dt : steps) {
      const double r = residual(dt);
      REQUIRE(r > 4 * floor);
      res.push_back(std::sqrt(r * r - floor * floor));
    }
    const double slope = fit_loglog_slope(steps, res);
    CHECK(slope > 1.8);
    CHECK(slope < 2.2);
  }
}

TEST_CASE("hj residual on the analytic combined-limit state") {
  const Grid g = make_grid(-12, 12, 1024);
  for (auto kind : {PacketCase::Free, PacketCase::ConstantForce, PacketCase::Harmonic}) {
    const GaussianSolution s({kind, 0.5, 0.3, 0.6, 0.5, 1.0, 1.2, 0.4});
    const double t = 1.1;
    const auto f = analytic_fields(s, g, t);
    const auto St = s.action_rate_field(g, t);
    const double quantum = hj_residual(f, St, s.potential(), HjMode::Quantum, t);
    const double classical = hj_residual(f, St, s.potential(), HjMode::Classical, t);
    const double qnorm = quantum_term_norm(f, 1.0);
    CHECK(quantum <= 1e-6 * qnorm);
    CHECK(classical > 0.0);
    CHECK(classical == doctest::Approx(qnorm).epsilon(1e-8));
  }
}

TEST_CASE("hj residual of a plane wave") {
  const Grid g = make_grid(0, 8, 64);
  const double p0 = 1.7, c = 0.3, m = 1.0, t = 0.8;
  const double E = p0 * p0 / (2 * m) + c;
  const MadelungFields f(RealField(g, std::vector<double>(64, 1.0 / 8)),
                         RealField::sample(g, [&](double x) { return -E * t + p0 * x; }), 0.0);
  const RealField St(g, std::vector<double>(64, -E));
  CHECK(hj_residual(f, St, PotentialSpec::polynomial({c}), HjMode::Classical, t) <= 1e-12);
  CHECK_THROWS_AS(hj_residual(f, St, PotentialSpec::polynomial({c}), HjMode::Quantum, t),
                  DomainError);
}

TEST_CASE("hj residuals of propagated states") {
  const Grid g = make_grid(-12, 12, 256);
  const auto V = PotentialSpec::harmonic(1, 1);
  const auto psi0 = init_gaussian(g, 0.5, 0.4, 0.5, 1.0, 1.0);
  const double floor = 1e-6;
  const double dt0 = 1.0 / 1250;
  REQUIRE(dt0 <= max_stable_step(g, V, 1.0));
  std::vector<double> quantum, gap;
  for (int level = 0; level < 3; ++level) {
    const double dt = dt0 / (1 << level);
    const auto steps = static_cast<std::size_t>(std::llround(0.5 / dt));
    const auto tr = snapshots(psi0, V, dt, steps, floor);
    const auto St = action_rate(tr.before, tr.after, 2 * dt);
    const double t = 0.5 + dt;
    quantum.push_back(hj_residual(tr.mid, St, V, HjMode::Quantum, t));
    const double classical = hj_residual(tr.mid, St, V, HjMode::Classical, t);
    gap.push_back(std::abs(classical / quantum_term_norm(tr.mid, 1.0) - 1.0));
  }
  CHECK(quantum[0] / quantum[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(quantum[1] / quantum[2] == doctest::Approx(4.0).epsilon(0.2));
  for (double v : gap) CHECK(v <= 0.02);
}
