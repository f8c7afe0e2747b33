#include "catoptrica/profile.hpp"

#include <cmath>
#include <utility>

namespace catoptrica {

ProfileCurve ProfileCurve::circle(Complex center, double radius, double u_min,
                                  double u_max) {
  auto z = [center, radius](double u) {
    return center + radius * std::polar(1.0, u);
  };
  auto dz = [radius](double u) {
    return radius * Complex(0.0, 1.0) * std::polar(1.0, u);
  };
  auto ddz = [radius](double u) { return -radius * std::polar(1.0, u); };
  return ProfileCurve(z, dz, ddz, u_min, u_max);
}

ProfileCurve ProfileCurve::ellipse(double a, double b, double u_min,
                                   double u_max) {
  auto z = [a, b](double u) { return Complex(a * std::cos(u), b * std::sin(u)); };
  auto dz = [a, b](double u) {
    return Complex(-a * std::sin(u), b * std::cos(u));
  };
  auto ddz = [a, b](double u) {
    return Complex(-a * std::cos(u), -b * std::sin(u));
  };
  return ProfileCurve(z, dz, ddz, u_min, u_max);
}

ProfileCurve ProfileCurve::parabola(double focal_length, double vertex_offset,
                                    double u_min, double u_max) {
  const double f = focal_length;
  auto z = [f, vertex_offset](double u) {
    return Complex(u, u * u / (4.0 * f) - f + vertex_offset);
  };
  auto dz = [f](double u) { return Complex(1.0, u / (2.0 * f)); };
  auto ddz = [f](double) { return Complex(0.0, 1.0 / (2.0 * f)); };
  return ProfileCurve(z, dz, ddz, u_min, u_max);
}

ProfileCurve ProfileCurve::polynomial(std::vector<Complex> coeffs,
                                      double u_min, double u_max) {
  auto horner = [](const std::vector<Complex>& c, double u) {
    Complex acc(0.0, 0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  };
  std::vector<Complex> d1, d2;
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    d1.push_back(static_cast<double>(k) * coeffs[k]);
  }
  for (std::size_t k = 1; k < d1.size(); ++k) {
    d2.push_back(static_cast<double>(k) * d1[k]);
  }
  auto z = [coeffs, horner](double u) { return horner(coeffs, u); };
  auto dz = [d1, horner](double u) { return horner(d1, u); };
  auto ddz = [d2, horner](double u) { return horner(d2, u); };
  return ProfileCurve(z, dz, ddz, u_min, u_max);
}

ProfileCurve ProfileCurve::from_function(std::function<Complex(double)> z0,
                                         double u_min, double u_max,
                                         double fd_step) {
  auto dz = [z0, fd_step](double u) {
    const double h = fd_step * std::max(1.0, std::abs(u));
    return (z0(u + h) - z0(u - h)) / (2.0 * h);
  };
  auto ddz = [z0, fd_step](double u) {
    // Wider step for the second difference keeps rounding error in check.
    const double h = std::sqrt(fd_step) * std::max(1.0, std::abs(u));
    return (z0(u + h) - 2.0 * z0(u) + z0(u - h)) / (h * h);
  };
  return ProfileCurve(std::move(z0), dz, ddz, u_min, u_max);
}

}  // namespace catoptrica
