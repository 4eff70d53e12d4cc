#include "sclab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sclab/errors.hpp"

namespace sclab {

std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes,
                                                  int max_order) {
  const std::size_t n = nodes.size();
  const auto m = static_cast<std::size_t>(max_order);
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  if (n == 0) return c;
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

// Unit-spacing weights for a `width`-point stencil evaluated at node `pos`.
const std::vector<double>& unit_weights(std::size_t width, std::size_t pos, int order) {
  static const auto table = [] {
    // table[width][pos][order-1]
    std::vector<std::vector<std::array<std::vector<double>, 2>>> t(kStencilWidth + 1);
    for (std::size_t w = 2; w <= kStencilWidth; ++w) {
      t[w].resize(w);
      std::vector<double> nodes(w);
      for (std::size_t i = 0; i < w; ++i) nodes[i] = static_cast<double>(i);
      for (std::size_t p = 0; p < w; ++p) {
        auto c = fornberg_weights(static_cast<double>(p), nodes, 2);
        t[w][p][0] = c[1];
        t[w][p][1] = c[2];
      }
    }
    return t;
  }();
  return table[width][pos][static_cast<std::size_t>(order - 1)];
}

}  // namespace

std::vector<double> stencil_derivative(std::span<const double> values, double dx, int order,
                                       std::size_t begin, std::size_t end) {
  if (order != 1 && order != 2) throw DomainError("stencil_derivative: order must be 1 or 2");
  if (end > values.size() || begin > end) throw DomainError("stencil_derivative: bad range");
  const std::size_t len = end - begin;
  std::vector<double> out(len, 0.0);
  if (len < 2 || (order == 2 && len < 3)) return out;
  const std::size_t width = std::min(kStencilWidth, len);
  const std::size_t half = width / 2;
  const double scale = order == 1 ? 1.0 / dx : 1.0 / (dx * dx);
  for (std::size_t i = 0; i < len; ++i) {
    std::size_t start = i >= half ? i - half : 0;
    if (start + width > len) start = len - width;
    const auto& w = unit_weights(width, i - start, order);
    double acc = 0.0;
    for (std::size_t s = 0; s < width; ++s) acc += w[s] * values[begin + start + s];
    out[i] = acc * scale;
  }
  return out;
}

RealField stencil_derivative(const RealField& f, int order) {
  auto d = stencil_derivative(f.values(), f.grid().dx(), order, 0, f.size());
  return RealField(f.grid(), std::move(d));
}

double interpolate_uniform(std::span<const double> values, double x0, double dx, double x,
                           std::size_t points) {
  const std::size_t n = values.size();
  if (n == 0) throw DomainError("interpolate_uniform: empty samples");
  points = std::min(points, n);
  const double s = (x - x0) / dx;
  auto start = static_cast<std::ptrdiff_t>(std::floor(s)) -
               static_cast<std::ptrdiff_t>(points / 2 - 1);
  if (points == 1) start = static_cast<std::ptrdiff_t>(std::lround(s));
  start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - points));
  double result = 0.0;
  for (std::size_t a = 0; a < points; ++a) {
    const double xa = static_cast<double>(start) + static_cast<double>(a);
    double basis = 1.0;
    for (std::size_t b = 0; b < points; ++b) {
      if (b == a) continue;
      const double xb = static_cast<double>(start) + static_cast<double>(b);
      basis *= (s - xb) / (xa - xb);
    }
    result += basis * values[static_cast<std::size_t>(start) + a];
  }
  return result;
}

double hermite_interpolate(std::span<const double> xs, std::span<const double> ys,
                           std::span<const double> dys, double x) {
  const std::size_t n = xs.size();
  if (n == 0) throw DomainError("hermite_interpolate: empty nodes");
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto j = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double h = xs[j + 1] - xs[j];
  const double t = (x - xs[j]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * ys[j] + h10 * h * dys[j] + h01 * ys[j + 1] + h11 * h * dys[j + 1];
}

QuadratureRule gauss_hermite(std::size_t n) {
  if (n == 0) throw DomainError("gauss_hermite: need at least one node");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const std::size_t m = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2 * dn + 1) - 1.85575 * std::pow(2 * dn + 1, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(dn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (dj + 1)) * p2 - std::sqrt(dj / (dj + 1)) * p3;
      }
      pp = std::sqrt(2 * dn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  // Ascending order.
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || y[i] == 0.0) throw DomainError("fit_loglog_slope: nonpositive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::abs(y[i]));
  }
  return fit_line(lx, ly).slope;
}

std::vector<double> time_derivative(std::span<const double> series, double step) {
  const std::size_t n = series.size();
  if (n < 3) throw DomainError("time_derivative: need at least 3 samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (series[i + 1] - series[i - 1]) / (2 * step);
  d[0] = (-3 * series[0] + 4 * series[1] - series[2]) / (2 * step);
  d[n - 1] = (3 * series[n - 1] - 4 * series[n - 2] + series[n - 3]) / (2 * step);
  return d;
}

}  // namespace sclab
