#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"
#include "sclab/potential.hpp"

using namespace sclab;

TEST_CASE("eval_potential examples") {
  CHECK(eval_potential(PotentialSpec::harmonic(1, 2), 1.0, 0.3) == 2.0);
  CHECK(eval_potential(PotentialSpec::free(), 5.0, 0.0) == 0.0);
  CHECK(eval_potential(PotentialSpec::polynomial({0, 0, 0, 1}), 2.0, 0.0) == 8.0);
  CHECK(eval_potential(PotentialSpec::constant_force(2.0), 3.0, 0.0) == -6.0);
}

TEST_CASE("eval_force examples") {
  CHECK(eval_force(PotentialSpec::harmonic(1, 1), 0.5, 0.0) == -0.5);
  CHECK(eval_force(PotentialSpec::constant_force(2.0), -7.0, 1.0) == 2.0);
  CHECK(eval_force(PotentialSpec::polynomial({0, 0, 0, 0, 1}), 1.0, 0.0) == -4.0);
}

TEST_CASE("force_field examples") {
  const Grid g = make_grid(-1, 1, 64);
  const auto zero = force_field(PotentialSpec::free(), g, 0.0);
  for (double v : zero.values()) CHECK(v == 0.0);
  const auto h = force_field(PotentialSpec::harmonic(1, 1), g, 0.0);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(h[i] == -g.x(i));

  const Grid wide = make_grid(-5, 5, 256);
  const auto table = PotentialSpec::tabulated(RealField::sample(wide, [](double x) { return x * x; }));
  const auto analytic = PotentialSpec::polynomial({0, 0, 1});
  const auto ft = force_field(table, wide, 0.0);
  const auto fa = force_field(analytic, wide, 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < wide.n(); ++i) worst = std::max(worst, std::abs(ft[i] - fa[i]));
  CHECK(worst <= 1e-8);
}

TEST_CASE("polynomial force matches the derivative of the sampled potential") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid g = make_grid(-2, 2, 256);
  for (int trial = 0; trial < 25; ++trial) {
    const int degree = trial % 9;
    std::vector<double> c(static_cast<std::size_t>(degree + 1));
    for (auto& v : c) v = u(rng);
    const auto V = PotentialSpec::polynomial(c);
    const auto dv = stencil_derivative(potential_field(V, g, 0.0), 1);
    const auto f = force_field(V, g, 0.0);
    double worst = 0.0;
    for (std::size_t i = g.n() / 8; i < 7 * g.n() / 8; ++i) {
      worst = std::max(worst, std::abs(f[i] + dv[i]));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("harmonic force is exactly -m omega^2 x") {
  const auto V = PotentialSpec::harmonic(2.5, 0.7);
  const Grid g = make_grid(-4, 4, 128);
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(eval_force(V, g.x(i), 0.0) == -2.5 * 0.7 * 0.7 * g.x(i));
  }
}

TEST_CASE("invalid potentials are rejected") {
  CHECK_THROWS_AS(PotentialSpec::harmonic(1, 0), DomainError);
  CHECK_THROWS_AS(PotentialSpec::harmonic(0, 1), DomainError);
  CHECK_THROWS_AS(PotentialSpec::free(-1), DomainError);
  CHECK_THROWS_AS(PotentialSpec::polynomial(std::vector<double>(10, 1.0)), DomainError);
  CHECK_NOTHROW(PotentialSpec::polynomial(std::vector<double>(9, 1.0)));
  const Grid g = make_grid(-1, 1, 16);
  const auto table = PotentialSpec::tabulated(RealField::zeros(g));
  CHECK_THROWS_AS(eval_potential(table, 5.0, 0.0), DomainError);
  CHECK_THROWS_AS(eval_force(table, -1.2, 0.0), DomainError);
  CHECK(eval_potential(table, 0.93, 0.0) == 0.0);
}

TEST_CASE("tabulated lookup is nearest-node") {
  const Grid g = make_grid(0, 16, 16);
  const auto table = PotentialSpec::tabulated(RealField::sample(g, [](double x) { return x; }));
  CHECK(eval_potential(table, 3.4, 0.0) == 3.0);
  CHECK(eval_potential(table, 3.6, 0.0) == 4.0);
}

TEST_CASE("time-dependent coefficient schedule") {
  const auto V = PotentialSpec::polynomial_schedule(
      {PolynomialSegment{0.0, {0, 0, 1}}, PolynomialSegment{2.0, {0, 0, 4}}});
  CHECK_FALSE(V.is_static());
  CHECK(eval_potential(V, 1.0, 0.5) == 1.0);
  CHECK(eval_potential(V, 1.0, 2.0) == 4.0);
  CHECK(eval_force(V, 1.0, 3.0) == -8.0);
  CHECK_FALSE(V.polynomial_degree().has_value());
}

TEST_CASE("tabulated potential from a two-column file") {
  const auto path = std::filesystem::temp_directory_path() / "sclab_table_test.txt";
  {
    std::ofstream out(path);
    out << "# x V\n";
    for (int i = 0; i < 32; ++i) {
      const double x = -4.0 + 0.25 * i;
      out << x << "  " << 0.5 * x * x << "\n";
    }
  }
  const auto V = PotentialSpec::tabulated_from_file(path, 1.0);
  CHECK(eval_potential(V, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK(eval_force(V, 1.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-10));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(PotentialSpec::tabulated_from_file(path, 1.0), DomainError);
}

TEST_CASE("degree classification") {
  CHECK(PotentialSpec::free().polynomial_degree() == 0);
  CHECK(PotentialSpec::constant_force(1.0).polynomial_degree() == 1);
  CHECK(PotentialSpec::harmonic(1, 1).polynomial_degree() == 2);
  CHECK(PotentialSpec::polynomial({1, 0, 0, 0, 2, 0}).polynomial_degree() == 4);
  CHECK(PotentialSpec::free().is_free());
  CHECK_FALSE(PotentialSpec::harmonic(1, 1).is_free());
}
