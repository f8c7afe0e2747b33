#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace catoptrica {

using Complex = std::complex<double>;

// Failure modes of the geometric pipeline. Every throwing operation tags its
// exception with one of these so sweeps can collect per-point diagnostics
// instead of aborting.
enum class errc {
  south_pole,
  degenerate_chart,
  focal_blowup,
  not_incident,
  twisted_congruence,
  non_integrable,
  singular_profile,
  source_on_mirror,
  degenerate_focal,
  config_error,
};

const char* errc_name(errc code);

class OpticsError : public std::runtime_error {
 public:
  OpticsError(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Direction coordinate on the unit sphere minus the downward pole, obtained
// by stereographic projection. The excluded direction has no coordinate;
// constructing a non-finite value throws rather than encoding a sentinel.
struct DirCoord {
  Complex value{0.0, 0.0};

  DirCoord() = default;
  DirCoord(Complex v) : value(v) {
    if (!is_finite(v)) {
      throw OpticsError(errc::degenerate_chart,
                        "direction coordinate is not finite");
    }
  }
  DirCoord(double re, double im) : DirCoord(Complex(re, im)) {}
  operator Complex() const { return value; }
};

// Point of space, with the horizontal plane packed into one complex slot:
// (x1, x2, x3) = (Re z, Im z, t).
struct Point3 {
  Complex z{0.0, 0.0};
  double t = 0.0;

  double x1() const { return z.real(); }
  double x2() const { return z.imag(); }
  double x3() const { return t; }
};

inline Point3 operator+(Point3 a, Point3 b) { return {a.z + b.z, a.t + b.t}; }
inline Point3 operator-(Point3 a, Point3 b) { return {a.z - b.z, a.t - b.t}; }
inline Point3 operator*(double s, Point3 a) { return {s * a.z, s * a.t}; }

inline double dot(Point3 a, Point3 b) {
  return a.x1() * b.x1() + a.x2() * b.x2() + a.t * b.t;
}

inline double norm3(Point3 a) { return std::sqrt(dot(a, a)); }

// Unit vector with the same horizontal/vertical split. |h|^2 + v^2 = 1.
struct UnitVec3 {
  Complex h{0.0, 0.0};
  double v = 0.0;

  Point3 as_point() const { return {h, v}; }
};

inline double dot(UnitVec3 a, UnitVec3 b) {
  return std::real(a.h * std::conj(b.h)) + a.v * b.v;
}

inline double dot(Point3 a, UnitVec3 b) { return dot(a, b.as_point()); }

// Oriented line: direction coordinate plus the fiber coordinate encoding the
// perpendicular offset from the origin.
struct OrientedLine {
  DirCoord xi;
  Complex eta{0.0, 0.0};
};

// Two-valued orientation flag used for normal branches and ray orientations.
enum class Sign : int { plus = +1, minus = -1 };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }
inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

// Orientation choices for reflection through a translation-invariant surface:
// sign0 picks the normal branch, branch1 picks the source-ray orientation.
struct SignCombo {
  Sign sign0 = Sign::plus;
  Sign branch1 = Sign::plus;
};

}  // namespace catoptrica
