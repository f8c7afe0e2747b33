#pragma once

#include <functional>
#include <vector>

#include "catoptrica/grid.hpp"
#include "catoptrica/profile.hpp"
#include "catoptrica/types.hpp"

// Independent ray-tracing check built on plain Cartesian vector algebra.
// Nothing here computes through the line coordinates (xi, eta); agreement
// between this module and the coordinate pipeline is evidence, not
// construction.
namespace catoptrica::oracle {

struct Ray3 {
  Point3 origin;
  UnitVec3 dir;
};

struct RayFamily {
  std::function<Ray3(double, double)> eval;  // (u, v) -> ray
};

// Ray from the origin reflected at surface point (z0(u), v):
//   d  = (z0, v) / |(z0, v)|,  n = sign * i dz0 / |dz0| (horizontal),
//   d' = d - 2 (d.n) n.
// Throws errc::singular_profile when |dz0| < 1e-12 and
// errc::source_on_mirror when the surface point is within 1e-12 of the
// origin. The reflected ray does not depend on the normal sign.
Ray3 trace_reflect(const ProfileCurve& p, double u, double v,
                   Sign normal_sign = Sign::plus);

// Point-source rays reflected in the surface, as a family over (u, v).
RayFamily reflected_family(const ProfileCurve& p);

// Determinant of the 3x3 real Jacobian of (u, v, r) -> origin(u,v) +
// r dir(u,v), by central finite differences with steps 1e-5 * max(1, |.|).
// Zeros along r locate focal points of the family.
double jacobian_det(const RayFamily& fam, double u, double v, double r);

// Determinant of the 2x2 Jacobian of (u, r) -> horizontal components, for
// families whose rays at (u, v_plane) lie in the horizontal plane.
double planar_jacobian_det(const RayFamily& fam, double u, double r,
                           double v_plane = 0.0);

struct CausticHit {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
  Point3 point;
};

// Scans r in [r_lo, r_hi] at every grid node for zeros of the Jacobian
// determinant: sign changes are refined by bisection to |dr| < 1e-10, and
// |det| minima below 1e-8 with no sign change are reported as coincident
// roots. Hits are emitted in grid order, ascending in r within a node.
std::vector<CausticHit> caustic_scan(const RayFamily& fam, const Grid2& grid,
                                     double r_lo, double r_hi,
                                     int samples = 64);

// Same scan against the planar determinant along a single row v = v_plane.
std::vector<CausticHit> planar_caustic_scan(const RayFamily& fam, double u_min,
                                            double u_max, int nu, double r_lo,
                                            double r_hi, int samples = 64,
                                            double v_plane = 0.0);

}  // namespace catoptrica::oracle
