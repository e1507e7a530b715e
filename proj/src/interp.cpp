#include "horizonforge/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hf::interp {

Pchip::Pchip(std::vector<double> xs, std::vector<double> ys)
    : x_(std::move(xs)), y_(std::move(ys)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("Pchip: need >= 2 matching knots");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i] < x_[i + 1]))
      throw std::invalid_argument("Pchip: knots must be strictly increasing");
  d_.resize(n);
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  d_[0] = delta[0];
  d_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
      double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
}

std::size_t Pchip::locate(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_[x_.size() - 2]) return x_.size() - 2;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return std::size_t(it - x_.begin()) - 1;
}

double Pchip::operator()(double x) const {
  std::size_t i = locate(x);
  double h = x_[i + 1] - x_[i];
  double s = (x - x_[i]) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double Pchip::derivative(double x) const {
  std::size_t i = locate(x);
  double h = x_[i + 1] - x_[i];
  double s = (x - x_[i]) / h;
  double g00 = 6 * s * (s - 1);
  double g10 = (1 - s) * (1 - 3 * s);
  double g01 = -g00;
  double g11 = s * (3 * s - 2);
  return (g00 * y_[i] + g01 * y_[i + 1]) / h + g10 * d_[i] + g11 * d_[i + 1];
}

Spline::Spline(std::vector<double> xs, std::vector<double> ys)
    : x_(std::move(xs)), y_(std::move(ys)) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n)
    throw std::invalid_argument("Spline: need >= 3 matching knots");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i] < x_[i + 1]))
      throw std::invalid_argument("Spline: knots must be strictly increasing");
  m_.assign(n, 0.0);
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  b[0] = b[n - 1] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    a[i] = hl / 6.0;
    b[i] = (hl + hr) / 3.0;
    c[i] = hr / 6.0;
    d[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  for (std::size_t i = 1; i < n; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  m_[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

std::size_t Spline::locate(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_[x_.size() - 2]) return x_.size() - 2;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return std::size_t(it - x_.begin()) - 1;
}

double Spline::operator()(double x) const {
  std::size_t i = locate(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

std::vector<double> cumtrapz(const std::vector<double>& f, double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i)
    out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return out;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> xs(n);
  double h = (b - a) / double(n - 1);
  for (int i = 0; i < n; ++i) xs[i] = a + i * h;
  xs.back() = b;
  return xs;
}

} // namespace hf::interp
