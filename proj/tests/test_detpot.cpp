#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sclab/detpot.hpp"
#include "sclab/errors.hpp"
#include "sclab/fft.hpp"
#include "sclab/numerics.hpp"

using namespace sclab;

namespace {

const Grid kGrid = make_grid(-10, 10, 1024);

double window_max_error(const RealField& got, const std::function<double(double)>& want) {
  const auto w = central_window(got.grid());
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = w.begin; i < w.end; ++i) {
    const double x = got.grid().x(i);
    worst = std::max(worst, std::abs(got[i] - want(x)));
    scale = std::max(scale, std::abs(want(x)));
  }
  return worst / std::max(1.0, scale);
}

double window_l2(const Grid& g, const std::function<double(double)>& f) {
  const auto w = central_window(g);
  double s = 0.0;
  for (std::size_t i = w.begin; i < w.end; ++i) s += f(g.x(i)) * f(g.x(i));
  return std::sqrt(s * g.dx());
}

}  // namespace

TEST_CASE("gaussian_convolve examples") {
  const double eps = 0.1;
  const auto c = gaussian_convolve(RealField(kGrid, std::vector<double>(kGrid.n(), 3.7)), eps);
  for (std::size_t i = 0; i < kGrid.n(); ++i) CHECK(c[i] == doctest::Approx(3.7).epsilon(1e-13));

  const auto lin = gaussian_convolve(RealField::sample(kGrid, [](double x) { return x; }), eps);
  CHECK(window_max_error(lin, [](double x) { return x; }) <= 1e-10);

  const auto cub = gaussian_convolve(RealField::sample(kGrid, [](double x) { return x * x * x; }), eps);
  CHECK(window_max_error(cub, [&](double x) { return x * x * x + 1.5 * eps * x; }) <= 1e-8);

  CHECK_THROWS_AS(gaussian_convolve(lin, std::pow(20.0 / 12.0, 2) * 1.1), DomainError);
  CHECK_THROWS_AS(gaussian_convolve(lin, -1.0), DomainError);
  CHECK_THROWS_AS(gaussian_convolve(lin, std::pow(kGrid.dx(), 2)), DomainError);
  const auto same = gaussian_convolve(lin, 0.0);
  for (std::size_t i = 0; i < kGrid.n(); ++i) CHECK(same[i] == lin[i]);
}

TEST_CASE("convolution is exact on polynomials up to degree 6") {
  // Moments of the kernel: E g^2 = s, E g^4 = 3 s^2, E g^6 = 15 s^3, s = eps/2.
  for (double eps : {0.3, 0.05, 0.004}) {
    const double s = eps / 2;
    const std::vector<std::function<double(double)>> want{
        [](double) { return 1.0; },
        [](double x) { return x; },
        [&](double x) { return x * x + s; },
        [&](double x) { return x * x * x + 3 * s * x; },
        [&](double x) { return std::pow(x, 4) + 6 * s * x * x + 3 * s * s; },
        [&](double x) { return std::pow(x, 5) + 10 * s * std::pow(x, 3) + 15 * s * s * x; },
        [&](double x) {
          return std::pow(x, 6) + 15 * s * std::pow(x, 4) + 45 * s * s * x * x + 15 * s * s * s;
        },
    };
    for (int n = 0; n <= 6; ++n) {
      const auto F = RealField::sample(kGrid, [n](double x) { return std::pow(x, n); });
      CHECK(window_max_error(gaussian_convolve(F, eps), want[static_cast<std::size_t>(n)]) <= 1e-8);
    }
  }
}

TEST_CASE("detpot_residual examples") {
  CHECK(detpot_residual(PotentialSpec::polynomial({0.4, -1.2, 2.5}), 0.1, kGrid) <= 1e-10);

  const auto quartic = PotentialSpec::polynomial({0, 0, 0, 0, 1});
  const double want = window_l2(kGrid, [](double x) { return 6 * 0.1 * x; }) /
                      window_l2(kGrid, [](double x) { return 4 * x * x * x; });
  CHECK(std::abs(detpot_residual(quartic, 0.1, kGrid) - want) <= 1e-6);
  CHECK(detpot_residual(quartic, 0.1, kGrid) > 1e-3);

  const Grid fine = make_grid(-10, 10, 4096);
  std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4};
  std::vector<double> res;
  for (double e : eps) res.push_back(detpot_residual(quartic, e, fine));
  CHECK(fit_loglog_slope(eps, res) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fourier_residual examples") {
  const double eps = 0.05;
  // Near k = 0 the factor is eps k^2 / 4 to leading order.
  const auto lin = fourier_residual(PotentialSpec::harmonic(1, 1), eps, kGrid);
  for (std::size_t j = 1; j < 6; ++j) {
    const double k = lin.k[j];
    CHECK(lin.factor[j] == doctest::Approx(eps * k * k / 4).epsilon(eps * k * k / 4 + 1e-9));
  }
  CHECK(lin.window_norm <= 1e-8);

  const double q = 2 * std::numbers::pi * 8 / kGrid.length();
  // V = cos(qx)/q gives F = sin(qx); tabulate it to stay periodic.
  const auto V = PotentialSpec::tabulated(RealField::sample(kGrid, [&](double x) { return std::cos(q * x) / q; }));
  const auto s = fourier_residual(V, eps, kGrid);
  const auto F = RealField::sample(kGrid, [&](double x) { return std::sin(q * x); });
  const double norm_F = std::sqrt(integrate(RealField::sample(kGrid, [&](double x) { return std::sin(q * x) * std::sin(q * x); })));
  const double closed = (1 - std::exp(-eps * q * q / 4)) * norm_F;
  CHECK(s.total_norm == doctest::Approx(closed).epsilon(1e-6));
  (void)F;

  const auto zero = fourier_residual(PotentialSpec::polynomial({0, 0, 0, 1}), 0.0, kGrid);
  CHECK(zero.total_norm == 0.0);
  CHECK(zero.window_norm == 0.0);
}

TEST_CASE("fourier residual satisfies Parseval and matches the direct residual") {
  const std::vector<PotentialSpec> forces{
      PotentialSpec::polynomial({0, 0, 0, 1}), PotentialSpec::polynomial({0, 0, 0, 0, 1}),
      PotentialSpec::polynomial({0, 1, 0.3, 0.2, 0.05}),
      PotentialSpec::tabulated(RealField::sample(kGrid, [](double x) { return std::cos(x); }))};
  for (const auto& V : forces) {
    for (double eps : {0.2, 0.02}) {
      const auto f = fourier_residual(V, eps, kGrid);
      const auto F = force_field(V, kGrid, 0.0);
      const auto sm = gaussian_convolve(F, eps);
      double full = 0.0;
      for (std::size_t i = 0; i < kGrid.n(); ++i) full += (F[i] - sm[i]) * (F[i] - sm[i]);
      full = std::sqrt(full * kGrid.dx());
      CHECK(f.total_norm == doctest::Approx(full).epsilon(1e-10));
      CHECK(f.window_norm == doctest::Approx(detpot_residual(V, eps, kGrid)).epsilon(0.01));
    }
  }
}

TEST_CASE("classify examples") {
  const auto eps = default_epsilons(kGrid);
  for (const auto& V : {PotentialSpec::free(), PotentialSpec::constant_force(1.0),
                        PotentialSpec::harmonic(1, 1), PotentialSpec::polynomial({1, 2, 3})}) {
    const auto r = classify(V, kGrid, eps);
    CHECK(r.verdict == Verdict::Deterministic);
    CHECK_FALSE(r.scaling_exponent.has_value());
    CHECK(r.second_derivative_norm <= 1e-8);
  }
  const auto cosine =
      PotentialSpec::tabulated(RealField::sample(kGrid, [](double x) { return std::cos(x); }));
  for (const auto& V : {PotentialSpec::polynomial({0, 0, 0, 1}),
                        PotentialSpec::polynomial({0, 0, 0, 0, 1}), cosine}) {
    const auto r = classify(V, kGrid, eps);
    CHECK(r.verdict == Verdict::NonDeterministic);
    REQUIRE(r.scaling_exponent.has_value());
    CHECK(*r.scaling_exponent == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r.second_derivative_norm > 1e-3);
  }

  const auto tiny = PotentialSpec::polynomial({0, 0, 1, 0, 1e-12});
  const auto det = classify(tiny, kGrid, eps);
  CHECK(det.verdict == Verdict::Deterministic);
  CHECK(det.notes.size() == 2);
  CHECK(classify(tiny, kGrid, eps, 1e-20).verdict == Verdict::NonDeterministic);
}

TEST_CASE("classify rejects thin width lists and straddling residuals") {
  const auto V = PotentialSpec::polynomial({0, 0, 0, 0, 1});
  CHECK_THROWS_AS(classify(V, kGrid, {0.1, 0.01}), DomainError);
  CHECK_THROWS_AS(classify(V, kGrid, {0.1, 0.05, 0.02}), DomainError);
  // Residual ~ eps: pick tol between the largest and smallest residual.
  const auto eps = default_epsilons(kGrid);
  const double mid = std::sqrt(detpot_residual(V, eps[0], kGrid) * detpot_residual(V, eps[2], kGrid));
  CHECK_THROWS_AS(classify(V, kGrid, eps, mid), InconclusiveError);
}

TEST_CASE("forces that pass at every width have no curvature") {
  // Random quadratics pass and have F'' = 0; adding any cubic term fails.
  for (int trial = 0; trial < 5; ++trial) {
    const double a = 0.3 * trial - 0.5, b = 1.0 - 0.2 * trial, c = 0.1 + 0.4 * trial;
    const auto quad = classify(PotentialSpec::polynomial({a, b, c}), kGrid, default_epsilons(kGrid));
    REQUIRE(quad.verdict == Verdict::Deterministic);
    CHECK(quad.second_derivative_norm <= quad.tol);
    const auto cubic = classify(PotentialSpec::polynomial({a, b, c, 0.01 * (trial + 1)}), kGrid,
                                default_epsilons(kGrid));
    CHECK(cubic.verdict == Verdict::NonDeterministic);
  }
}
