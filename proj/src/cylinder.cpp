#include "catoptrica/cylinder.hpp"

#include <cmath>
#include <sstream>

namespace catoptrica {

namespace {

Complex unit_tangent_normal(const ProfileCurve& p, double u) {
  const Complex dz = p.dz0(u);
  const double speed = std::abs(dz);
  if (speed < 1e-12) {
    std::ostringstream os;
    os << "profile is singular at u=" << u;
    throw OpticsError(errc::singular_profile, os.str());
  }
  return Complex(0.0, 1.0) * dz / speed;
}

// The two unit normals of the profile are +/- i dz0/|dz0|; exactly these are
// the square roots of -dz0/conj(dz0). sign0 = plus means the branch that
// matches the principal square root at the left end of the parameter range,
// and the returned factor keeps that branch continuous across the whole
// range.
double branch_factor(const ProfileCurve& p, Sign sign0) {
  const double u_ref = p.u_min();
  const Complex dz = p.dz0(u_ref);
  if (std::abs(dz) < 1e-12) {
    throw OpticsError(errc::singular_profile,
                      "profile is singular at the branch reference point");
  }
  const Complex principal = std::sqrt(-dz / std::conj(dz));
  const Complex target = sign0 == Sign::plus ? principal : -principal;
  const Complex n_ref = Complex(0.0, 1.0) * dz / std::abs(dz);
  return std::real(target * std::conj(n_ref)) > 0.0 ? 1.0 : -1.0;
}

}  // namespace

SurfaceFrame normal_congruence(const ProfileCurve& p, const CylinderParam& q) {
  const double s = branch_factor(p, q.signs.sign0);
  const Complex xi0 = s * unit_tangent_normal(p, q.u);
  const Complex z = p.z0(q.u);
  const Complex eta0 =
      0.5 * (z - 2.0 * q.v * xi0 - std::conj(z) * xi0 * xi0);
  const double n = std::norm(xi0);
  const double r0 =
      (2.0 * std::real(std::conj(xi0) * z) + (1.0 - n) * q.v) / (1.0 + n);
  return {xi0, eta0, r0};
}

SourceRay source_ray(const ProfileCurve& p, const CylinderParam& q) {
  const Complex z = p.z0(q.u);
  const double len2 = std::norm(z) + q.v * q.v;
  if (len2 < 1e-24) {
    throw OpticsError(errc::source_on_mirror,
                      "surface point coincides with the source");
  }
  const double len = std::sqrt(len2);
  // xi1 = (-v + s sqrt(v^2 + |z0|^2)) / conj(z0) rewritten so the surface
  // points directly above/below the source stay representable:
  //   plus:  z0 / (len + v),  minus: -z0 / (len - v).
  double denom;
  Complex num;
  if (q.signs.branch1 == Sign::plus) {
    denom = len + q.v;
    num = z;
  } else {
    denom = len - q.v;
    num = -z;
  }
  if (std::abs(denom) <= 1e-12 * len) {
    throw OpticsError(errc::south_pole,
                      "source ray points along the excluded chart direction");
  }
  return {num / denom, Complex(0.0, 0.0)};
}

OrientedLine reflected_point_source(const ProfileCurve& p,
                                    const CylinderParam& q) {
  const SurfaceFrame f = normal_congruence(p, q);
  const SourceRay ray = source_ray(p, q);
  const Complex xi0 = f.xi0;
  const Complex xi1b = std::conj(ray.xi1);
  const Complex xi = -xi0 * xi0 * xi1b;
  const Complex eta = (std::conj(xi0) - xi0 * xi1b * xi1b) * xi0 * xi0 * f.r0;
  return {DirCoord(xi), eta};
}

Point3 focal_curve(const ProfileCurve& p, double u) {
  const Complex z = p.z0(u);
  const Complex dz = p.dz0(u);
  if (std::abs(dz) < 1e-12) {
    throw OpticsError(errc::singular_profile, "profile is singular");
  }
  const Complex zc =
      (z * std::conj(dz) - std::conj(z) * dz) / std::conj(dz);
  return {zc, 0.0};
}

Point3 focal_surface(const ProfileCurve& p, double u, double v) {
  const Complex z = p.z0(u);
  const Complex zb = std::conj(z);
  const Complex d = p.dz0(u);
  const Complex db = std::conj(d);
  const Complex dd = p.ddz0(u);
  const Complex ddb = std::conj(dd);

  const Complex den_terms[] = {2.0 * dd * db * z * zb, -2.0 * ddb * d * z * zb,
                               -d * d * db * zb, d * db * db * z};
  Complex den(0.0, 0.0);
  double den_scale = 0.0;
  for (const Complex& term : den_terms) {
    den += term;
    den_scale = std::max(den_scale, std::abs(term));
  }
  if (std::abs(den) <= 1e-12 * std::max(1.0, den_scale)) {
    std::ostringstream os;
    os << "focal surface denominator vanishes at u=" << u;
    throw OpticsError(errc::degenerate_focal, os.str());
  }
  const Complex num_z = 2.0 * dd * db * z * z * zb - 2.0 * ddb * d * z * z * zb +
                        d * d * d * zb * zb - 2.0 * d * d * db * z * zb +
                        d * db * db * z * z;
  const Complex num_t = 2.0 * v * z * zb * (ddb * d - dd * db);
  return {num_z / den, std::real(num_t / den)};
}

ParametricCongruence normal_parametric(const ProfileCurve& p, Sign sign0) {
  const double s = branch_factor(p, sign0);
  auto xi_of = [p, s](double u) { return s * unit_tangent_normal(p, u); };
  auto eval = [p, xi_of](Complex mu) -> OrientedLine {
    const double u = mu.real();
    const double v = mu.imag();
    const Complex xi0 = xi_of(u);
    const Complex z = p.z0(u);
    return {DirCoord(xi0),
            0.5 * (z - 2.0 * v * xi0 - std::conj(z) * xi0 * xi0)};
  };
  auto derivs = [p, s, xi_of](Complex mu) -> WirtingerDerivs {
    const double u = mu.real();
    const double v = mu.imag();
    const Complex z = p.z0(u);
    const Complex dz = p.dz0(u);
    const Complex ddz = p.ddz0(u);
    const double speed = std::abs(dz);
    if (speed < 1e-12) {
      throw OpticsError(errc::singular_profile, "profile is singular");
    }
    const Complex xi0 = xi_of(u);
    // d/du of s i dz/|dz|; d|dz|/du = Re(ddz conj(dz)) / |dz|.
    const Complex dxi_du =
        s * Complex(0.0, 1.0) *
        (ddz - dz * std::real(ddz * std::conj(dz)) / (speed * speed)) / speed;
    const Complex deta_du = 0.5 * (dz - 2.0 * v * dxi_du -
                                   std::conj(dz) * xi0 * xi0 -
                                   2.0 * std::conj(z) * xi0 * dxi_du);
    const Complex deta_dv = -xi0;
    const Complex i(0.0, 1.0);
    WirtingerDerivs w;
    w.dxi = 0.5 * dxi_du;
    w.dbxi = 0.5 * dxi_du;
    w.deta = 0.5 * (deta_du - i * deta_dv);
    w.dbeta = 0.5 * (deta_du + i * deta_dv);
    return w;
  };
  return ParametricCongruence(eval, derivs);
}

ParametricCongruence reflected_parametric(const ProfileCurve& p,
                                          SignCombo signs) {
  auto eval = [p, signs](Complex mu) -> OrientedLine {
    return reflected_point_source(p, {mu.real(), mu.imag(), signs});
  };
  return ParametricCongruence(eval);
}

namespace detail {

FocalNodeResult focal_node(const ProfileCurve& p,
                           const ParametricCongruence& c, SignCombo signs,
                           double u, double v) {
  FocalNodeResult out;
  const Complex mu(u, v);
  try {
    const BasedScalars b = scalars_at_base(c, mu);
    const FocalSolution sol = focal_distances(b.scalars);
    const OrientedLine line = c.at(mu);
    // Affine parameter of the surface point on the reflected line; roots
    // below it lie behind the mirror (virtual focal points).
    const Point3 surface{p.z0(u), v};
    const double r_surface = affine_parameter(surface, line);
    for (int k = 0; k < sol.count; ++k) {
      const double r = b.base_r + sol.roots[k];
      out.rows.push_back(
          {u, v, signs, k, r < r_surface, r, incidence(line, r)});
    }
  } catch (const OpticsError& e) {
    out.failed = true;
    out.diagnostic = {mu, e.code(), e.what()};
  }
  return out;
}

}  // namespace detail

FocalCloud focal_set_numeric(const ProfileCurve& p, const Grid2& grid,
                             std::span<const SignCombo> combos) {
  FocalCloud out;
  for (const SignCombo& signs : combos) {
    const ParametricCongruence c = reflected_parametric(p, signs);
    for (int i = 0; i < grid.nu; ++i) {
      for (int j = 0; j < grid.nv; ++j) {
        detail::FocalNodeResult node =
            detail::focal_node(p, c, signs, grid.u_at(i), grid.v_at(j));
        for (auto& row : node.rows) out.rows.push_back(row);
        if (node.failed) out.diagnostics.push_back(node.diagnostic);
      }
    }
  }
  return out;
}

}  // namespace catoptrica
