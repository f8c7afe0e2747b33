#include "catoptrica/reflection.hpp"

#include <algorithm>
#include <cmath>

namespace catoptrica {

namespace {

Complex reflect_denominator(Complex xi0, Complex xi1) {
  return (1.0 - xi0 * std::conj(xi0)) * std::conj(xi1) - 2.0 * std::conj(xi0);
}

}  // namespace

DirCoord reflect_direction(const SurfaceFrame& f, DirCoord xi1) {
  const Complex x0 = f.xi0;
  const Complex x1 = xi1;
  const Complex denom = reflect_denominator(x0, x1);
  const double scale =
      std::abs(1.0 - std::norm(x0)) * std::abs(x1) + 2.0 * std::abs(x0);
  if (std::abs(denom) <= 1e-13 * std::max(1.0, scale)) {
    throw OpticsError(errc::south_pole,
                      "reflected direction leaves the chart");
  }
  return DirCoord((2.0 * x0 * std::conj(x1) + 1.0 - x0 * std::conj(x0)) /
                  denom);
}

Complex intersection_residual(const SurfaceFrame& f, const SourceRay& ray) {
  const Complex x0 = f.xi0;
  const Complex x1 = ray.xi1;
  const double d = 1.0 + std::norm(x0);
  const Complex a = 1.0 + std::conj(x0) * x1;
  const Complex b = x0 - x1;
  return ray.eta1 - (a * a * f.eta0 - b * b * std::conj(f.eta0)) / (d * d) -
         b * a * f.r0 / d;
}

ReflectedFiberForms reflected_fiber_forms(const SurfaceFrame& f,
                                          const SourceRay& ray) {
  const Complex x0 = f.xi0;
  const Complex x1 = ray.xi1;
  const Complex denom = reflect_denominator(x0, x1);
  const Complex denom2 = denom * denom;
  const Complex bbar = std::conj(x0) - std::conj(x1);
  const Complex abar = 1.0 + x0 * std::conj(x1);
  const double d = 1.0 + std::norm(x0);
  ReflectedFiberForms out;
  out.direct = (bbar * bbar * f.eta0 - abar * abar * std::conj(f.eta0) +
                bbar * abar * d * f.r0) /
               denom2;
  out.alt =
      (-(d * d) * std::conj(ray.eta1) + 2.0 * bbar * abar * d * f.r0) / denom2;
  return out;
}

OrientedLine reflect_line(const SurfaceFrame& f, const SourceRay& ray) {
  const Complex res = intersection_residual(f, ray);
  const double res_scale = std::max(
      {1.0, std::abs(ray.eta1), std::abs(f.eta0), std::abs(f.r0)});
  if (std::abs(res) > 1e-9 * res_scale) {
    throw OpticsError(errc::not_incident,
                      "ray does not meet the reflection point");
  }
  const DirCoord xi = reflect_direction(f, DirCoord(ray.xi1));
  const ReflectedFiberForms eta = reflected_fiber_forms(f, ray);
  if (std::abs(eta.direct - eta.alt) >
      1e-9 * std::max(1.0, std::abs(eta.direct))) {
    throw OpticsError(errc::not_incident,
                      "reflected fiber coordinate cross-check failed");
  }
  return {xi, eta.direct};
}

OrientedLine reflect_oracle(const SurfaceFrame& f, const SourceRay& ray) {
  const OrientedLine normal{DirCoord(f.xi0), f.eta0};
  const Point3 p = incidence(normal, f.r0);
  const UnitVec3 d = dir_to_vec(DirCoord(ray.xi1));
  const UnitVec3 n = dir_to_vec(DirCoord(f.xi0));
  const double dn = dot(d, n);
  const UnitVec3 reflected{d.h - 2.0 * dn * n.h, d.v - 2.0 * dn * n.v};
  return line_through(p, vec_to_dir(reflected)).line;
}

}  // namespace catoptrica
