#pragma once

#include <span>
#include <vector>

#include "catoptrica/congruence.hpp"
#include "catoptrica/grid.hpp"
#include "catoptrica/profile.hpp"
#include "catoptrica/reflection.hpp"
#include "catoptrica/types.hpp"

namespace catoptrica {

// Parameters of a point on the translation-invariant surface plus the
// orientation choices used when reflecting through it.
struct CylinderParam {
  double u = 0.0;
  double v = 0.0;
  SignCombo signs{};
};

// Oriented normal line of the surface at (u, v):
//   xi0   = s i dz0 / |dz0|   (the square root of -dz0/conj(dz0) whose branch
//                              is continuous in u; sign0 selects the branch
//                              at the profile's left endpoint),
//   eta0  = (z0 - 2 v xi0 - conj(z0) xi0^2) / 2,
//   r0    = (conj(xi0) z0 + xi0 conj(z0) + (1 - |xi0|^2) v) / (1 + |xi0|^2).
// Throws errc::singular_profile when |dz0| < 1e-12.
SurfaceFrame normal_congruence(const ProfileCurve& p, const CylinderParam& q);

// Oriented line from the origin through the surface point (z0(u), v), or the
// reversed orientation for branch1 = minus. eta1 = 0 always. Throws
// errc::source_on_mirror when the surface point is within 1e-12 of the
// origin and errc::south_pole when the requested orientation is the excluded
// chart direction.
SourceRay source_ray(const ProfileCurve& p, const CylinderParam& q);

// Closed-form reflection of the point-source ray in the surface:
//   xi  = -xi0^2 conj(xi1),
//   eta = (conj(xi0) - xi0 conj(xi1)^2) xi0^2 r0.
OrientedLine reflected_point_source(const ProfileCurve& p,
                                    const CylinderParam& q);

// In-plane branch of the reflected focal set:
//   z = (z0 conj(dz0) - conj(z0) dz0) / conj(dz0), t = 0.
Point3 focal_curve(const ProfileCurve& p, double u);

// Off-plane branch of the reflected focal set; z depends on u only, t is
// linear in v. Throws errc::degenerate_focal when the shared denominator
// vanishes (relative to the magnitude of its terms).
Point3 focal_surface(const ProfileCurve& p, double u, double v);

// Normal lines as a parametric congruence over mu = u + i v, with analytic
// Wirtinger derivatives assembled from the profile derivatives.
ParametricCongruence normal_parametric(const ProfileCurve& p, Sign sign0);

// Reflected point-source lines as a parametric congruence over mu = u + i v
// (finite-difference derivatives).
ParametricCongruence reflected_parametric(const ProfileCurve& p,
                                          SignCombo signs);

struct FocalCloudRow {
  double u = 0.0;
  double v = 0.0;
  SignCombo signs{};
  int branch = 0;    // root index at this node, ascending in r
  bool virt = false; // focal point lies behind the surface point on the ray
  double r = 0.0;    // affine parameter of the focal point on the line
  Point3 point;
};

struct FocalCloud {
  std::vector<FocalCloudRow> rows;
  std::vector<GridDiagnostic> diagnostics;
};

// Focal points of the reflected congruences over the grid, one sweep per
// sign combination, via finite-difference optical scalars. Per-node failures
// become diagnostics.
FocalCloud focal_set_numeric(const ProfileCurve& p, const Grid2& grid,
                             std::span<const SignCombo> combos);

namespace detail {

// Focal rows of one congruence at one node; shared by focal_set_numeric and
// the sweep orchestration.
struct FocalNodeResult {
  std::vector<FocalCloudRow> rows;
  bool failed = false;
  GridDiagnostic diagnostic{};
};
FocalNodeResult focal_node(const ProfileCurve& p,
                           const ParametricCongruence& c, SignCombo signs,
                           double u, double v);

}  // namespace detail

}  // namespace catoptrica
