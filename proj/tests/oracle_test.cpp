#include "catoptrica/oracle.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace catoptrica;

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform(std::mt19937_64& g, double a, double b) {
  return a + (b - a) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

UnitVec3 normalize(Complex h, double v) {
  const double n = std::sqrt(std::norm(h) + v * v);
  return {h / n, v / n};
}

}  // namespace

TEST_CASE("centered circle retro-reflects the radial component") {
  // Source at the center of the unit circle: the incident ray travels along
  // (e^{iu}, v)/s with s = sqrt(1 + v^2); reflection flips its horizontal
  // part, d' = (-e^{iu}, v)/s.
  const ProfileCurve p = ProfileCurve::circle({0.0, 0.0}, 1.0);
  const oracle::Ray3 ray = oracle::trace_reflect(p, 0.0, 1.0);
  const double s = std::sqrt(2.0);
  CHECK(std::abs(ray.dir.h - Complex(-1.0 / s, 0.0)) < 1e-14);
  CHECK(std::abs(ray.dir.v - 1.0 / s) < 1e-14);
  CHECK(std::abs(ray.origin.z - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(ray.origin.t - 1.0) < 1e-14);

  // The reflected ray cannot depend on which of the two normals is used.
  const oracle::Ray3 other = oracle::trace_reflect(p, 0.0, 1.0, Sign::minus);
  CHECK(std::abs(ray.dir.h - other.dir.h) < 1e-15);
  CHECK(std::abs(ray.dir.v - other.dir.v) < 1e-15);
}

TEST_CASE("reflected directions are unit and obey the mirror law") {
  std::mt19937_64 gen(61);
  const ProfileCurve p = ProfileCurve::ellipse(1.8, 1.1);
  for (int k = 0; k < 300; ++k) {
    const double u = uniform(gen, 0.0, 2.0 * kPi);
    const double v = uniform(gen, -1.5, 1.5);
    const oracle::Ray3 ray = oracle::trace_reflect(p, u, v);
    const Point3 sp{p.z0(u), v};
    const UnitVec3 d = normalize(sp.z, sp.t);
    const Complex dz = p.dz0(u);
    const UnitVec3 n = normalize(Complex(0.0, 1.0) * dz / std::abs(dz), 0.0);

    CHECK(std::abs(std::sqrt(std::norm(ray.dir.h) + ray.dir.v * ray.dir.v) -
                   1.0) < 1e-14);
    // Normal components are opposite, tangential components are preserved.
    CHECK(std::abs(dot(ray.dir.as_point(), n) + dot(d.as_point(), n)) < 1e-13);
    const Point3 tang_in = d.as_point() - dot(d.as_point(), n) * n.as_point();
    const Point3 tang_out =
        ray.dir.as_point() - dot(ray.dir.as_point(), n) * n.as_point();
    CHECK(norm3(tang_in - tang_out) < 1e-13);
  }
}

TEST_CASE("parallel family has unit jacobian everywhere") {
  const oracle::RayFamily fam{[](double u, double v) {
    return oracle::Ray3{{Complex(u, v), 0.0}, {Complex(0.0, 0.0), 1.0}};
  }};
  for (double r : {-3.0, 0.0, 1.0, 7.5}) {
    CHECK(std::abs(oracle::jacobian_det(fam, 0.3, -0.8, r) - 1.0) < 1e-8);
  }
}

TEST_CASE("point-source family jacobian grows like r squared") {
  // Rays from the origin toward (u, v, 1). At u = v = 0 the transverse
  // spread is exactly r in both directions, so det = r^2 with a focal zero
  // at the source.
  const oracle::RayFamily fam{[](double u, double v) {
    return oracle::Ray3{{Complex(0.0, 0.0), 0.0},
                        normalize(Complex(u, v), 1.0)};
  }};
  CHECK(std::abs(oracle::jacobian_det(fam, 0.0, 0.0, 2.0) - 4.0) < 1e-5);
  CHECK(std::abs(oracle::jacobian_det(fam, 0.0, 0.0, -1.0) - 1.0) < 1e-5);
  CHECK(std::abs(oracle::jacobian_det(fam, 0.0, 0.0, 0.0)) < 1e-8);
}

TEST_CASE("caustic scan finds a common focus") {
  // In-plane rays from the unit circle aimed at (2, 0, 0): every ray passes
  // through that point at r = |2 - e^{iu}|.
  const oracle::RayFamily fam{[](double u, double /*v*/) {
    const Complex o = std::polar(1.0, u);
    return oracle::Ray3{{o, 0.0}, normalize(Complex(2.0, 0.0) - o, 0.0)};
  }};

  const auto hits =
      oracle::planar_caustic_scan(fam, 0.2, 2.0 * kPi - 0.2, 9, 0.1, 5.0);
  CHECK(hits.size() == 9);
  // The bisection bracket closes to 1e-10, but finite-difference noise in
  // the determinant can shift the located zero by a few 1e-8 where the
  // direction field is nearly stationary in u.
  for (const oracle::CausticHit& hit : hits) {
    const double expected_r = std::abs(Complex(2.0, 0.0) - std::polar(1.0, hit.u));
    CHECK(std::abs(hit.r - expected_r) < 1e-7);
    CHECK(norm3(hit.point - Point3{Complex(2.0, 0.0), 0.0}) < 1e-7);
  }
}

TEST_CASE("three-dimensional scan localizes a through-point") {
  // Skew the planar family slightly in v so the 3x3 determinant is honest:
  // origins at (e^{iu}, v), directions toward (2, 0, 0).
  const oracle::RayFamily fam{[](double u, double v) {
    const Point3 o{std::polar(1.0, u), v};
    const Point3 target{Complex(2.0, 0.0), 0.0};
    const Point3 d = target - o;
    return oracle::Ray3{o, normalize(d.z, d.t)};
  }};
  const Grid2 g = Grid2::linspace(0.3, 2.0, 4, -0.4, 0.4, 3);
  const auto hits = oracle::caustic_scan(fam, g, 0.1, 5.0);
  CHECK(!hits.empty());
  for (const oracle::CausticHit& hit : hits) {
    CHECK(norm3(hit.point - Point3{Complex(2.0, 0.0), 0.0}) < 1e-6);
  }
}

TEST_CASE("planar determinant refuses rays that leave the plane") {
  const oracle::RayFamily fam{[](double u, double v) {
    return oracle::Ray3{{Complex(u, v), 0.0}, normalize(Complex(1.0, 0.0), 0.5)};
  }};
  CHECK_THROWS_AS(oracle::planar_jacobian_det(fam, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("tracer propagates profile errors") {
  const ProfileCurve cusp = ProfileCurve::polynomial({{0.0, 0.0}, {0.0, 0.0},
                                                      {1.0, 0.0}});
  CHECK_THROWS_AS(oracle::trace_reflect(cusp, 0.0, 0.5), OpticsError);

  const ProfileCurve through = ProfileCurve::circle({1.0, 0.0}, 1.0);
  try {
    oracle::trace_reflect(through, kPi, 0.0);
    FAIL("expected source_on_mirror");
  } catch (const OpticsError& e) {
    CHECK(e.code() == errc::source_on_mirror);
  }
}

TEST_CASE("reflected family agrees with the direct tracer") {
  const ProfileCurve p = ProfileCurve::circle({0.3, -0.2}, 1.2);
  const oracle::RayFamily fam = oracle::reflected_family(p);
  std::mt19937_64 gen(62);
  for (int k = 0; k < 50; ++k) {
    const double u = uniform(gen, 0.0, 2.0 * kPi);
    const double v = uniform(gen, -1.0, 1.0);
    const oracle::Ray3 a = fam.eval(u, v);
    const oracle::Ray3 b = oracle::trace_reflect(p, u, v);
    CHECK(norm3(a.origin - b.origin) == 0.0);
    CHECK(std::abs(a.dir.h - b.dir.h) == 0.0);
    CHECK(a.dir.v == b.dir.v);
  }
}
