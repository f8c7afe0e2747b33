#pragma once

#include <functional>
#include <vector>

#include "catoptrica/types.hpp"

namespace catoptrica {

// Planar profile curve u -> z0(u) generating a translation-invariant surface
// {(z0(u), v)}. Built-in shapes carry analytic derivatives; arbitrary
// callables fall back to central finite differences.
class ProfileCurve {
 public:
  static ProfileCurve circle(Complex center, double radius, double u_min = 0.0,
                             double u_max = 2.0 * 3.14159265358979323846);
  static ProfileCurve ellipse(double a, double b, double u_min = 0.0,
                              double u_max = 2.0 * 3.14159265358979323846);
  // Focus at the origin when vertex_offset = 0:
  //   z0(u) = u + i (u^2 / (4 f) - f + vertex_offset).
  static ProfileCurve parabola(double focal_length, double vertex_offset = 0.0,
                               double u_min = -2.0, double u_max = 2.0);
  // z0(u) = sum_k coeffs[k] u^k with complex coefficients.
  static ProfileCurve polynomial(std::vector<Complex> coeffs,
                                 double u_min = -1.0, double u_max = 1.0);
  static ProfileCurve from_function(std::function<Complex(double)> z0,
                                    double u_min, double u_max,
                                    double fd_step = 1e-5);

  Complex z0(double u) const { return z_(u); }
  Complex dz0(double u) const { return dz_(u); }
  Complex ddz0(double u) const { return ddz_(u); }

  double u_min() const { return u_min_; }
  double u_max() const { return u_max_; }

 private:
  ProfileCurve(std::function<Complex(double)> z,
               std::function<Complex(double)> dz,
               std::function<Complex(double)> ddz, double u_min, double u_max)
      : z_(std::move(z)), dz_(std::move(dz)), ddz_(std::move(ddz)),
        u_min_(u_min), u_max_(u_max) {}

  std::function<Complex(double)> z_, dz_, ddz_;
  double u_min_, u_max_;
};

}  // namespace catoptrica
