#include "sclab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sclab/errors.hpp"
#include "sclab/numerics.hpp"

namespace sclab {

namespace pk = potential_kind;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::vector<double>& active_coeffs(const pk::Polynomial& p, double t) {
  const PolynomialSegment* active = &p.schedule.front();
  for (const auto& seg : p.schedule) {
    if (seg.t_begin <= t) active = &seg;
  }
  return active->coeffs;
}

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double horner_derivative(const std::vector<double>& c, double x, int order) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(order);) {
    double factor = 1.0;
    for (int j = 0; j < order; ++j) factor *= static_cast<double>(i - static_cast<std::size_t>(j));
    v = v * x + factor * c[i];
  }
  return v;
}

std::size_t nearest_node(const pk::Tabulated& tab, double x) {
  const Grid& g = tab.grid;
  const double s = (x - g.x_min()) / g.dx();
  const double last = static_cast<double>(g.n() - 1);
  if (!(s >= -0.5) || !(s <= last + 0.5)) {
    throw DomainError("tabulated potential: x = " + std::to_string(x) + " outside table range");
  }
  return static_cast<std::size_t>(std::clamp(std::lround(s), 0L, static_cast<long>(g.n() - 1)));
}

void check_polynomial(const std::vector<PolynomialSegment>& schedule) {
  if (schedule.empty()) throw DomainError("polynomial potential: empty schedule");
  double prev = -INFINITY;
  for (const auto& seg : schedule) {
    if (seg.coeffs.empty()) throw DomainError("polynomial potential: empty coefficient list");
    if (static_cast<int>(seg.coeffs.size()) - 1 > kMaxPolynomialDegree) {
      throw DomainError("polynomial potential: degree exceeds " +
                        std::to_string(kMaxPolynomialDegree));
    }
    for (double c : seg.coeffs) {
      if (!std::isfinite(c)) throw DomainError("polynomial potential: non-finite coefficient");
    }
    if (seg.t_begin < prev) throw DomainError("polynomial potential: schedule not sorted");
    prev = seg.t_begin;
  }
}

}  // namespace

PotentialSpec::PotentialSpec(Kind kind, double mass) : kind_(std::move(kind)), mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("potential: mass must be > 0");
}

PotentialSpec PotentialSpec::free(double mass) { return {pk::Free{}, mass}; }

PotentialSpec PotentialSpec::constant_force(double f0, double mass) {
  if (!std::isfinite(f0)) throw DomainError("constant force: non-finite F0");
  return {pk::ConstantForce{f0}, mass};
}

PotentialSpec PotentialSpec::harmonic(double mass, double omega) {
  if (!(omega > 0.0)) throw DomainError("harmonic potential: omega must be > 0");
  return {pk::Harmonic{omega}, mass};
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coeffs, double mass) {
  return polynomial_schedule({PolynomialSegment{0.0, std::move(coeffs)}}, mass);
}

PotentialSpec PotentialSpec::polynomial_schedule(std::vector<PolynomialSegment> schedule,
                                                 double mass) {
  check_polynomial(schedule);
  return {pk::Polynomial{std::move(schedule)}, mass};
}

PotentialSpec PotentialSpec::tabulated(const RealField& values, double mass) {
  std::vector<double> v(values.values().begin(), values.values().end());
  auto d = stencil_derivative(v, values.grid().dx(), 1, 0, v.size());
  for (double& f : d) f = -f;
  return {pk::Tabulated{values.grid(), std::move(v), std::move(d)}, mass};
}

PotentialSpec PotentialSpec::tabulated_from_file(const std::filesystem::path& path, double mass) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open potential table '" + path.string() + "'");
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    if (!(row >> x)) continue;
    if (!(row >> v)) throw DomainError("potential table '" + path.string() + "': missing V column");
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 16 || !is_power_of_two(xs.size())) {
    throw DomainError("potential table '" + path.string() +
                      "': need a power-of-two number (>= 16) of rows");
  }
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double expected = xs.front() + static_cast<double>(i) * dx;
    if (std::abs(xs[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw DomainError("potential table '" + path.string() + "': x column is not uniform");
    }
  }
  Grid grid(xs.front(), xs.front() + static_cast<double>(xs.size()) * dx, xs.size());
  return tabulated(RealField(grid, std::move(vs)), mass);
}

bool PotentialSpec::is_static() const {
  if (const auto* p = std::get_if<pk::Polynomial>(&kind_)) return p->schedule.size() == 1;
  return true;
}

bool PotentialSpec::is_free() const {
  return std::visit(overloaded{
                        [](const pk::Free&) { return true; },
                        [](const pk::ConstantForce& c) { return c.f0 == 0.0; },
                        [](const pk::Harmonic&) { return false; },
                        [](const pk::Polynomial& p) {
                          return std::all_of(p.schedule.begin(), p.schedule.end(),
                                             [](const PolynomialSegment& s) {
                                               return std::all_of(s.coeffs.begin(), s.coeffs.end(),
                                                                  [](double c) { return c == 0.0; });
                                             });
                        },
                        [](const pk::Tabulated& t) {
                          return std::all_of(t.values.begin(), t.values.end(),
                                             [](double v) { return v == 0.0; });
                        },
                    },
                    kind_);
}

std::optional<int> PotentialSpec::polynomial_degree() const {
  return std::visit(overloaded{
                        [](const pk::Free&) -> std::optional<int> { return 0; },
                        [](const pk::ConstantForce& c) -> std::optional<int> {
                          return c.f0 == 0.0 ? 0 : 1;
                        },
                        [](const pk::Harmonic&) -> std::optional<int> { return 2; },
                        [](const pk::Polynomial& p) -> std::optional<int> {
                          if (p.schedule.size() != 1) return std::nullopt;
                          const auto& c = p.schedule.front().coeffs;
                          int d = 0;
                          for (std::size_t i = 0; i < c.size(); ++i) {
                            if (c[i] != 0.0) d = static_cast<int>(i);
                          }
                          return d;
                        },
                        [](const pk::Tabulated&) -> std::optional<int> { return std::nullopt; },
                    },
                    kind_);
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const pk::Free&) { os << "free"; },
                 [&](const pk::ConstantForce& c) { os << "constant_force(F0=" << c.f0 << ")"; },
                 [&](const pk::Harmonic& h) { os << "harmonic(omega=" << h.omega << ")"; },
                 [&](const pk::Polynomial& p) {
                   os << "polynomial(";
                   for (std::size_t s = 0; s < p.schedule.size(); ++s) {
                     if (s) os << "; ";
                     os << "t>=" << p.schedule[s].t_begin << ":";
                     for (std::size_t i = 0; i < p.schedule[s].coeffs.size(); ++i) {
                       os << (i ? "," : "") << p.schedule[s].coeffs[i];
                     }
                   }
                   os << ")";
                 },
                 [&](const pk::Tabulated& t) {
                   os << "tabulated(n=" << t.grid.n() << ", x=[" << t.grid.x_min() << ","
                      << t.grid.x(t.grid.n() - 1) << "])";
                 },
             },
             kind_);
  os << " m=" << mass_;
  return os.str();
}

double eval_potential(const PotentialSpec& spec, double x, double t) {
  const double m = spec.mass();
  return std::visit(overloaded{
                        [](const pk::Free&) { return 0.0; },
                        [&](const pk::ConstantForce& c) { return -c.f0 * x; },
                        [&](const pk::Harmonic& h) { return 0.5 * m * h.omega * h.omega * x * x; },
                        [&](const pk::Polynomial& p) { return horner(active_coeffs(p, t), x); },
                        [&](const pk::Tabulated& tab) { return tab.values[nearest_node(tab, x)]; },
                    },
                    spec.kind());
}

double eval_force(const PotentialSpec& spec, double x, double t) {
  const double m = spec.mass();
  return std::visit(overloaded{
                        [](const pk::Free&) { return 0.0; },
                        [&](const pk::ConstantForce& c) { return c.f0; },
                        [&](const pk::Harmonic& h) { return -m * h.omega * h.omega * x; },
                        [&](const pk::Polynomial& p) {
                          return -horner_derivative(active_coeffs(p, t), x, 1);
                        },
                        [&](const pk::Tabulated& tab) { return tab.force[nearest_node(tab, x)]; },
                    },
                    spec.kind());
}

double eval_curvature(const PotentialSpec& spec, double x, double t) {
  const double m = spec.mass();
  return std::visit(overloaded{
                        [](const pk::Free&) { return 0.0; },
                        [](const pk::ConstantForce&) { return 0.0; },
                        [&](const pk::Harmonic& h) { return m * h.omega * h.omega; },
                        [&](const pk::Polynomial& p) {
                          return horner_derivative(active_coeffs(p, t), x, 2);
                        },
                        [&](const pk::Tabulated& tab) {
                          const std::size_t i = nearest_node(tab, x);
                          auto d2 = stencil_derivative(tab.values, tab.grid.dx(), 2, 0,
                                                       tab.values.size());
                          return d2[i];
                        },
                    },
                    spec.kind());
}

RealField potential_field(const PotentialSpec& spec, const Grid& grid, double t) {
  return RealField::sample(grid, [&](double x) { return eval_potential(spec, x, t); });
}

RealField force_field(const PotentialSpec& spec, const Grid& grid, double t) {
  return RealField::sample(grid, [&](double x) { return eval_force(spec, x, t); });
}

}  // namespace sclab
