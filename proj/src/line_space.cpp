#include "catoptrica/line_space.hpp"

#include <cmath>

namespace catoptrica {

const char* errc_name(errc code) {
  switch (code) {
    case errc::south_pole: return "south_pole";
    case errc::degenerate_chart: return "degenerate_chart";
    case errc::focal_blowup: return "focal_blowup";
    case errc::not_incident: return "not_incident";
    case errc::twisted_congruence: return "twisted_congruence";
    case errc::non_integrable: return "non_integrable";
    case errc::singular_profile: return "singular_profile";
    case errc::source_on_mirror: return "source_on_mirror";
    case errc::degenerate_focal: return "degenerate_focal";
    case errc::config_error: return "config_error";
  }
  return "unknown";
}

UnitVec3 dir_to_vec(DirCoord xi) {
  const Complex x = xi.value;
  const double n = std::norm(x);
  const double denom = 1.0 + n;
  return {2.0 * x / denom, (1.0 - n) / denom};
}

DirCoord vec_to_dir(const UnitVec3& d) {
  if (d.v <= -1.0 + 1e-12) {
    throw OpticsError(errc::south_pole,
                      "direction has no finite chart coordinate");
  }
  return DirCoord(d.h / (1.0 + d.v));
}

Point3 incidence(const OrientedLine& line, double r) {
  const Complex xi = line.xi;
  const Complex eta = line.eta;
  const double n = std::norm(xi);
  const double denom2 = (1.0 + n) * (1.0 + n);
  const Complex z =
      (2.0 * (eta - std::conj(eta) * xi * xi) + 2.0 * xi * (1.0 + n) * r) /
      denom2;
  const double t =
      (-4.0 * std::real(eta * std::conj(xi)) + (1.0 - n * n) * r) / denom2;
  return {z, t};
}

LineThroughResult line_through(const Point3& p, DirCoord xi) {
  const Complex x = xi.value;
  const double n = std::norm(x);
  const Complex eta = 0.5 * (p.z - 2.0 * p.t * x - std::conj(p.z) * x * x);
  const double r =
      (2.0 * std::real(std::conj(x) * p.z) + (1.0 - n) * p.t) / (1.0 + n);
  return {OrientedLine{DirCoord(x), eta}, r};
}

double closest_point_orthogonality(const OrientedLine& line) {
  const Point3 foot = incidence(line, 0.0);
  return dot(foot, dir_to_vec(line.xi));
}

double chordal_distance(DirCoord a, DirCoord b) {
  const UnitVec3 va = dir_to_vec(a);
  const UnitVec3 vb = dir_to_vec(b);
  return norm3(va.as_point() - vb.as_point());
}

double affine_parameter(const Point3& p, const OrientedLine& line) {
  const Point3 foot = incidence(line, 0.0);
  return dot(p - foot, dir_to_vec(line.xi));
}

double point_line_distance(const Point3& p, const OrientedLine& line) {
  const Point3 foot = incidence(line, 0.0);
  const UnitVec3 d = dir_to_vec(line.xi);
  const Point3 rel = p - foot;
  const Point3 residual = rel - dot(rel, d) * d.as_point();
  return norm3(residual);
}

}  // namespace catoptrica
