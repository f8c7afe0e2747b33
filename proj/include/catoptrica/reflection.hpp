#pragma once

#include "catoptrica/line_space.hpp"
#include "catoptrica/types.hpp"

namespace catoptrica {

// First-order data of a reflecting surface at one of its points: the oriented
// normal line (xi0, eta0) and the affine parameter r0 of the surface point on
// that line.
struct SurfaceFrame {
  Complex xi0{0.0, 0.0};
  Complex eta0{0.0, 0.0};
  double r0 = 0.0;
};

// Incoming oriented line.
struct SourceRay {
  Complex xi1{0.0, 0.0};
  Complex eta1{0.0, 0.0};
};

// Direction of the reflection of xi1 in the plane normal to xi0:
//   xi = (2 xi0 conj(xi1) + 1 - xi0 conj(xi0)) /
//        ((1 - xi0 conj(xi0)) conj(xi1) - 2 conj(xi0)).
// Throws errc::south_pole when the denominator vanishes (the reflected
// direction is the excluded chart direction).
DirCoord reflect_direction(const SurfaceFrame& f, DirCoord xi1);

// Residual of the incidence condition tying the ray to the surface point:
// zero exactly when the ray passes through the point framed by f.
Complex intersection_residual(const SurfaceFrame& f, const SourceRay& ray);

// Reflected oriented line. Preconditions: the ray is incident within
// 1e-9 (relative); throws errc::not_incident otherwise. The fiber coordinate
// is computed twice, from the incidence-free form and from the form that
// consumes eta1 directly, and the two must agree within 1e-9.
OrientedLine reflect_line(const SurfaceFrame& f, const SourceRay& ray);

// Both evaluations of the reflected fiber coordinate: `direct` uses
// (eta0, r0) only, `alt` consumes eta1. They agree exactly for incident rays.
struct ReflectedFiberForms {
  Complex direct{0.0, 0.0};
  Complex alt{0.0, 0.0};
};
ReflectedFiberForms reflected_fiber_forms(const SurfaceFrame& f,
                                          const SourceRay& ray);

// Same reflection computed with plain vector algebra: recover the surface
// point and unit vectors, reflect d' = d - 2 (d.n) n, re-encode the line.
// Shares no algebra with reflect_line beyond the coordinate maps.
OrientedLine reflect_oracle(const SurfaceFrame& f, const SourceRay& ray);

}  // namespace catoptrica
