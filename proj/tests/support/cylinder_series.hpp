#pragma once

// Partial-wave solution for a plane wave exp(i k0 x) scattered by a
// homogeneous penetrable circular cylinder. Used only as a test oracle.

#include <cmath>
#include <complex>

namespace pnj::testing {

class CylinderSeries {
 public:
  CylinderSeries(double k0, double index, double radius)
      : k0_(k0), k1_(k0 * index), radius_(radius),
        order_(static_cast<int>(std::ceil(k0 * radius)) + 15) {}

  int order() const { return order_; }

  /// Total field at (r, theta) relative to the cylinder center, theta measured
  /// from the incidence direction. Incident phase referenced to the center.
  std::complex<double> total(double r, double theta) const {
    std::complex<double> sum = 0.0;
    if (r >= radius_) sum = std::polar(1.0, k0_ * r * std::cos(theta));
    for (int m = -order_; m <= order_; ++m) {
      const int n = std::abs(m);
      const std::complex<double> e = std::polar(1.0, m * theta);
      if (r >= radius_) {
        sum += outer_coefficient(m) * hankel(n, k0_ * r) * e;
      } else {
        sum += inner_coefficient(m) * jn(n, k1_ * r) * e;
      }
    }
    return sum;
  }

 private:
  static std::complex<double> ipow(int m) {
    switch (((m % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  static double jn(int n, double x) { return std::cyl_bessel_j(static_cast<double>(n), x); }
  static double yn(int n, double x) { return std::cyl_neumann(static_cast<double>(n), x); }
  static double djn(int n, double x) { return n == 0 ? -jn(1, x) : 0.5 * (jn(n - 1, x) - jn(n + 1, x)); }
  static double dyn(int n, double x) { return n == 0 ? -yn(1, x) : 0.5 * (yn(n - 1, x) - yn(n + 1, x)); }
  static std::complex<double> hankel(int n, double x) { return {jn(n, x), yn(n, x)}; }
  static std::complex<double> dhankel(int n, double x) { return {djn(n, x), dyn(n, x)}; }

  std::complex<double> outer_coefficient(int m) const {
    const int n = std::abs(m);
    const double a0 = k0_ * radius_, a1 = k1_ * radius_;
    const std::complex<double> num = k1_ * djn(n, a1) * jn(n, a0) - k0_ * jn(n, a1) * djn(n, a0);
    const std::complex<double> den = k0_ * jn(n, a1) * dhankel(n, a0) - k1_ * djn(n, a1) * hankel(n, a0);
    return ipow(n) * num / den;
  }
  std::complex<double> inner_coefficient(int m) const {
    const int n = std::abs(m);
    const double a0 = k0_ * radius_, a1 = k1_ * radius_;
    return (ipow(n) * jn(n, a0) + outer_coefficient(m) * hankel(n, a0)) / jn(n, a1);
  }

  double k0_, k1_, radius_;
  int order_;
};

}  // namespace pnj::testing
