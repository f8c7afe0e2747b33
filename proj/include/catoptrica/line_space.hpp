#pragma once

#include "catoptrica/types.hpp"

namespace catoptrica {

// Direction coordinate -> unit vector:
//   (h, v) = (2 xi, 1 - |xi|^2) / (1 + |xi|^2).
UnitVec3 dir_to_vec(DirCoord xi);

// Unit vector -> direction coordinate, xi = h / (1 + v).
// Throws errc::south_pole when v is within 1e-12 of -1; that direction has no
// finite coordinate.
DirCoord vec_to_dir(const UnitVec3& d);

// Point of the line (xi, eta) at affine parameter r, measured from the foot
// point (the point of the line closest to the origin).
Point3 incidence(const OrientedLine& line, double r);

struct LineThroughResult {
  OrientedLine line;
  double r;  // affine parameter of the input point on the returned line
};

// Oriented line through p with direction xi:
//   eta = (z - 2 t xi - conj(z) xi^2) / 2,
//   r   = (conj(xi) z + xi conj(z) + (1 - |xi|^2) t) / (1 + |xi|^2).
LineThroughResult line_through(const Point3& p, DirCoord xi);

// Dot product of (foot point - origin) with the line direction. Zero for a
// correctly encoded line; used as a self-consistency residual.
double closest_point_orthogonality(const OrientedLine& line);

// Euclidean distance between the direction vectors of two coordinates.
// Behaves like |a - b| for small coordinates and stays meaningful near the
// chart boundary.
double chordal_distance(DirCoord a, DirCoord b);

// Distance from p to the line (orthogonal projection residual).
double point_line_distance(const Point3& p, const OrientedLine& line);

// Affine parameter of the orthogonal projection of p onto the line.
double affine_parameter(const Point3& p, const OrientedLine& line);

}  // namespace catoptrica
