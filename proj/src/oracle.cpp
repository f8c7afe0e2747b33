#include "catoptrica/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace catoptrica::oracle {

namespace {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

Vec3 ray_point(const Ray3& ray, double r) {
  return {ray.origin.x1() + r * ray.dir.h.real(),
          ray.origin.x2() + r * ray.dir.h.imag(),
          ray.origin.t + r * ray.dir.v};
}

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) +
         a.z * (b.x * c.y - b.y * c.x);
}

double fd_step_for(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

// Generic 1D zero scan shared by the spatial and planar determinants: sample,
// bisect sign changes to |dr| < 1e-10, and report |g| minima below 1e-8 as
// coincident roots.
std::vector<double> scan_roots(const std::function<double(double)>& g,
                               double r_lo, double r_hi, int samples) {
  std::vector<double> roots;
  if (samples < 2) return roots;
  std::vector<double> rs(samples), gs(samples);
  const double dr = (r_hi - r_lo) / (samples - 1);
  for (int k = 0; k < samples; ++k) {
    rs[k] = r_lo + k * dr;
    gs[k] = g(rs[k]);
  }
  for (int k = 0; k + 1 < samples; ++k) {
    double a = rs[k], b = rs[k + 1];
    double ga = gs[k], gb = gs[k + 1];
    if (ga == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (gb == 0.0) continue;  // handled as the left edge of the next bracket
    if (ga * gb > 0.0) continue;
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = g(m);
      if (gm == 0.0) {
        a = b = m;
        break;
      }
      if (ga * gm < 0.0) {
        b = m;
        gb = gm;
      } else {
        a = m;
        ga = gm;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  // Interior |g| minima with no adjacent sign change: refine by golden
  // section on |g| and keep the point when the determinant is ~0 there.
  for (int k = 1; k + 1 < samples; ++k) {
    if (std::abs(gs[k]) <= std::abs(gs[k - 1]) &&
        std::abs(gs[k]) <= std::abs(gs[k + 1]) &&
        gs[k - 1] * gs[k] > 0.0 && gs[k] * gs[k + 1] > 0.0) {
      double a = rs[k - 1], b = rs[k + 1];
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = std::abs(g(x1)), f2 = std::abs(g(x2));
      for (int it = 0; it < 120 && b - a > 1e-11; ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = std::abs(g(x1));
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = std::abs(g(x2));
        }
      }
      const double r = 0.5 * (a + b);
      if (std::abs(g(r)) < 1e-8) roots.push_back(r);
    }
  }
  std::sort(roots.begin(), roots.end());
  // Merge refinements of the same root from adjacent brackets.
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() ||
        std::abs(r - unique.back()) > 1e-9 * std::max(1.0, std::abs(r))) {
      unique.push_back(r);
    }
  }
  return unique;
}

}  // namespace

Ray3 trace_reflect(const ProfileCurve& p, double u, double v,
                   Sign normal_sign) {
  const Complex z = p.z0(u);
  const Complex dz = p.dz0(u);
  const double speed = std::abs(dz);
  if (speed < 1e-12) {
    throw OpticsError(errc::singular_profile, "profile is singular");
  }
  const double len = std::sqrt(std::norm(z) + v * v);
  if (len < 1e-12) {
    throw OpticsError(errc::source_on_mirror,
                      "surface point coincides with the source");
  }
  const UnitVec3 d{z / len, v / len};
  const Complex nh = sign_value(normal_sign) * Complex(0.0, 1.0) * dz / speed;
  const double dn = std::real(d.h * std::conj(nh));  // n has no vertical part
  const UnitVec3 reflected{d.h - 2.0 * dn * nh, d.v};
  return {Point3{z, v}, reflected};
}

RayFamily reflected_family(const ProfileCurve& p) {
  return {[p](double u, double v) { return trace_reflect(p, u, v); }};
}

double jacobian_det(const RayFamily& fam, double u, double v, double r) {
  const auto point = [&](double uu, double vv, double rr) {
    return ray_point(fam.eval(uu, vv), rr);
  };
  const double hu = fd_step_for(u);
  const double hv = fd_step_for(v);
  const double hr = fd_step_for(r);
  const auto diff = [](const Vec3& a, const Vec3& b, double h) {
    return Vec3{(a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h),
                (a.z - b.z) / (2.0 * h)};
  };
  const Vec3 cu = diff(point(u + hu, v, r), point(u - hu, v, r), hu);
  const Vec3 cv = diff(point(u, v + hv, r), point(u, v - hv, r), hv);
  const Vec3 cr = diff(point(u, v, r + hr), point(u, v, r - hr), hr);
  return det3(cu, cv, cr);
}

double planar_jacobian_det(const RayFamily& fam, double u, double r,
                           double v_plane) {
  const auto point = [&](double uu, double rr) {
    const Ray3 ray = fam.eval(uu, v_plane);
    if (std::abs(ray.dir.v) > 1e-9 || std::abs(ray.origin.t - v_plane) > 1e-9) {
      throw std::invalid_argument("ray family is not planar at this row");
    }
    const Vec3 q = ray_point(ray, rr);
    return std::pair<double, double>{q.x, q.y};
  };
  const double hu = fd_step_for(u);
  const double hr = fd_step_for(r);
  const auto [xpu, ypu] = point(u + hu, r);
  const auto [xmu, ymu] = point(u - hu, r);
  const auto [xpr, ypr] = point(u, r + hr);
  const auto [xmr, ymr] = point(u, r - hr);
  const double ax = (xpu - xmu) / (2.0 * hu), ay = (ypu - ymu) / (2.0 * hu);
  const double bx = (xpr - xmr) / (2.0 * hr), by = (ypr - ymr) / (2.0 * hr);
  return ax * by - ay * bx;
}

std::vector<CausticHit> caustic_scan(const RayFamily& fam, const Grid2& grid,
                                     double r_lo, double r_hi, int samples) {
  std::vector<CausticHit> hits;
  for (int i = 0; i < grid.nu; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      const double u = grid.u_at(i);
      const double v = grid.v_at(j);
      const auto g = [&](double r) { return jacobian_det(fam, u, v, r); };
      for (double r : scan_roots(g, r_lo, r_hi, samples)) {
        const Vec3 q = ray_point(fam.eval(u, v), r);
        hits.push_back({u, v, r, Point3{{q.x, q.y}, q.z}});
      }
    }
  }
  return hits;
}

std::vector<CausticHit> planar_caustic_scan(const RayFamily& fam, double u_min,
                                            double u_max, int nu, double r_lo,
                                            double r_hi, int samples,
                                            double v_plane) {
  std::vector<CausticHit> hits;
  const double du = nu > 1 ? (u_max - u_min) / (nu - 1) : 0.0;
  for (int i = 0; i < nu; ++i) {
    const double u = u_min + i * du;
    const auto g = [&](double r) {
      return planar_jacobian_det(fam, u, r, v_plane);
    };
    for (double r : scan_roots(g, r_lo, r_hi, samples)) {
      const Vec3 q = ray_point(fam.eval(u, v_plane), r);
      hits.push_back({u, v_plane, r, Point3{{q.x, q.y}, q.z}});
    }
  }
  return hits;
}

}  // namespace catoptrica::oracle
