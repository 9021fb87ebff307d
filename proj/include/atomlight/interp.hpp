#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "atomlight/constants.hpp"

namespace atomlight {

namespace detail {

// Index of the interval [x_i, x_{i+1}] containing x; throws outside [x0, xN].
inline std::size_t locate(const std::vector<double>& x, double xq) {
  if (x.size() < 2 || xq < x.front() || xq > x.back())
    throw ComputeError("interpolation query outside table domain");
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i > 0) --i;
  if (i >= x.size() - 1) i = x.size() - 2;
  return i;
}

template <class Y>
Y hermite(double t, double h, const Y& y0, const Y& y1, const Y& m0,
          const Y& m1) {
  const double t2 = t * t, t3 = t2 * t;
  return y0 * (2 * t3 - 3 * t2 + 1) + m0 * (h * (t3 - 2 * t2 + t)) +
         y1 * (-2 * t3 + 3 * t2) + m1 * (h * (t3 - t2));
}

}  // namespace detail

// C1 cubic Hermite on a nonuniform grid with three-point slope estimates;
// works for real or complex ordinates. No extrapolation.
template <class Y>
class CubicHermite {
 public:
  CubicHermite() = default;

  CubicHermite(std::vector<double> x, std::vector<Y> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw ConfigError("cubic interpolation needs >= 2 matching nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i] < x_[i + 1]))
        throw ConfigError("interpolation abscissae must be increasing");
    m_.resize(n);
    if (n == 2) {
      m_[0] = m_[1] = (y_[1] - y_[0]) * (1.0 / (x_[1] - x_[0]));
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
      const Y dl = (y_[i] - y_[i - 1]) * (1.0 / hl);
      const Y dr = (y_[i + 1] - y_[i]) * (1.0 / hr);
      m_[i] = (dl * hr + dr * hl) * (1.0 / (hl + hr));
    }
    m_[0] = end_slope(x_[0], x_[1], x_[2], y_[0], y_[1], y_[2]);
    m_[n - 1] = end_slope(x_[n - 1], x_[n - 2], x_[n - 3], y_[n - 1], y_[n - 2],
                          y_[n - 3]);
  }

  Y operator()(double xq) const {
    const std::size_t i = detail::locate(x_, xq);
    const double h = x_[i + 1] - x_[i];
    return detail::hermite((xq - x_[i]) / h, h, y_[i], y_[i + 1], m_[i],
                           m_[i + 1]);
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }

 private:
  static Y end_slope(double x0, double x1, double x2, const Y& y0, const Y& y1,
                     const Y& y2) {
    // derivative at x0 of the parabola through the three nodes
    const double h0 = x1 - x0, h1 = x2 - x1;
    const Y d0 = (y1 - y0) * (1.0 / h0), d1 = (y2 - y1) * (1.0 / h1);
    return d0 + (d0 - d1) * (h0 / (h0 + h1));
  }

  std::vector<double> x_;
  std::vector<Y> y_;
  std::vector<Y> m_;
};

// Fritsch-Carlson monotone cubic (PCHIP). Preserves monotonicity of the data;
// no extrapolation.
class Pchip {
 public:
  Pchip() = default;

  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw ConfigError("pchip needs >= 2 matching nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i] < x_[i + 1]))
        throw ConfigError("pchip abscissae must be increasing");
    m_.resize(n);
    if (n == 2) {
      m_[0] = m_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
      return;
    }
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
        m_[i] = 0.0;
      } else {
        const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
        m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    m_[0] = edge_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }

  double operator()(double xq) const {
    const std::size_t i = detail::locate(x_, xq);
    const double h = x_[i + 1] - x_[i];
    return detail::hermite((xq - x_[i]) / h, h, y_[i], y_[i + 1], m_[i],
                           m_[i + 1]);
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  static double edge_slope(double h0, double h1, double d0, double d1) {
    double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0)
      m = 0.0;
    else if ((d0 > 0) != (d1 > 0) && std::abs(m) > 3 * std::abs(d0))
      m = 3 * d0;
    return m;
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

}  // namespace atomlight
