#include "catoptrica/congruence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace catoptrica {

namespace {

std::string mu_text(Complex mu) {
  std::ostringstream os;
  os << "mu=(" << mu.real() << ";" << mu.imag() << ")";
  return os.str();
}

void require_finite_line(const OrientedLine& line, Complex mu) {
  if (!is_finite(line.xi.value) || !is_finite(line.eta)) {
    throw OpticsError(errc::degenerate_chart,
                      "congruence left the chart at " + mu_text(mu));
  }
}

// Directional derivatives of eta along the line at parameter r, from the
// Wirtinger derivatives of (xi, eta):
//   d+eta = deta  + r dxi  - 2 eta conj(xi) dxi  / (1 + |xi|^2)
//   d-eta = dbeta + r dbxi - 2 eta conj(xi) dbxi / (1 + |xi|^2)
struct EtaDerivs {
  Complex dplus, dminus;
  WirtingerDerivs w;
  OrientedLine line;
};

EtaDerivs eta_derivs(const ParametricCongruence& c, Complex mu, double r) {
  EtaDerivs out;
  out.line = c.at(mu);
  require_finite_line(out.line, mu);
  out.w = c.derivs_at(mu);
  const Complex xi = out.line.xi;
  const Complex eta = out.line.eta;
  const Complex shift = 2.0 * eta * std::conj(xi) / (1.0 + std::norm(xi));
  out.dplus = out.w.deta + r * out.w.dxi - shift * out.w.dxi;
  out.dminus = out.w.dbeta + r * out.w.dbxi - shift * out.w.dbxi;
  return out;
}

}  // namespace

OrientedLine ParametricCongruence::at(Complex mu) const { return eval_(mu); }

WirtingerDerivs ParametricCongruence::derivs_at(Complex mu) const {
  if (derivs_) return derivs_(mu);
  const double h = fd_step_ * std::max(1.0, std::abs(mu));
  const OrientedLine xp = eval_(mu + Complex(h, 0.0));
  const OrientedLine xm = eval_(mu - Complex(h, 0.0));
  const OrientedLine yp = eval_(mu + Complex(0.0, h));
  const OrientedLine ym = eval_(mu - Complex(0.0, h));
  for (const OrientedLine* s : {&xp, &xm, &yp, &ym}) {
    require_finite_line(*s, mu);
  }
  const Complex xi_x = (Complex(xp.xi) - Complex(xm.xi)) / (2.0 * h);
  const Complex xi_y = (Complex(yp.xi) - Complex(ym.xi)) / (2.0 * h);
  const Complex eta_x = (xp.eta - xm.eta) / (2.0 * h);
  const Complex eta_y = (yp.eta - ym.eta) / (2.0 * h);
  const Complex i(0.0, 1.0);
  WirtingerDerivs w;
  w.dxi = 0.5 * (xi_x - i * xi_y);
  w.dbxi = 0.5 * (xi_x + i * xi_y);
  w.deta = 0.5 * (eta_x - i * eta_y);
  w.dbeta = 0.5 * (eta_x + i * eta_y);
  return w;
}

Complex d_plus_eta(const ParametricCongruence& c, Complex mu, double r) {
  return eta_derivs(c, mu, r).dplus;
}

Complex d_minus_eta(const ParametricCongruence& c, Complex mu, double r) {
  return eta_derivs(c, mu, r).dminus;
}

OpticalScalars optical_scalars(const ParametricCongruence& c, Complex mu,
                               double r) {
  const EtaDerivs d = eta_derivs(c, mu, r);
  const double denom = std::norm(d.dminus) - std::norm(d.dplus);
  const double scale = std::norm(d.dminus) + std::norm(d.dplus);
  // The gate must sit above the finite-difference noise floor of the
  // derivative products (~1e-11 relative); a sharper gate lets focal base
  // points slip through on noise and return garbage scalars.
  if (std::abs(denom) <= 1e-9 * std::max(1.0, scale)) {
    throw OpticsError(errc::focal_blowup,
                      "optical scalars blow up at " + mu_text(mu));
  }
  // Conjugate-parameter derivatives of conj(xi): d conj(xi) = conj(dbxi),
  // db conj(xi) = conj(dxi).
  const Complex dxi_bar = std::conj(d.w.dbxi);
  const Complex dbxi_bar = std::conj(d.w.dxi);
  const Complex rho = (d.dplus * dbxi_bar - d.dminus * dxi_bar) / denom;
  const Complex sigma =
      (std::conj(d.dplus) * dxi_bar - std::conj(d.dminus) * dbxi_bar) / denom;
  if (!is_finite(rho) || !is_finite(sigma) ||
      std::max(std::abs(rho), std::abs(sigma)) > 1e8) {
    throw OpticsError(errc::focal_blowup,
                      "optical scalars blow up at " + mu_text(mu));
  }
  return OpticalScalars::from_rho_sigma(rho, sigma);
}

OpticalScalars sachs_evolve(const OpticalScalars& s0, double r) {
  const double theta0 = s0.theta();
  const double q = 1.0 - 2.0 * theta0 * r + s0.kappa * r * r;
  const double scale =
      1.0 + 2.0 * std::abs(theta0 * r) + std::abs(s0.kappa) * r * r;
  if (std::abs(q) <= 1e-12 * scale) {
    throw OpticsError(errc::focal_blowup, "transport hit a focal point");
  }
  return OpticalScalars::from_rho_sigma((s0.rho - s0.kappa * r) / q,
                                        s0.sigma / q);
}

std::pair<double, double> sachs_residual(const OpticalScalars& s0, double r,
                                         double h) {
  const OpticalScalars sp = sachs_evolve(s0, r + h);
  const OpticalScalars sm = sachs_evolve(s0, r - h);
  const OpticalScalars s = sachs_evolve(s0, r);
  const Complex drho = (sp.rho - sm.rho) / (2.0 * h);
  const Complex dsigma = (sp.sigma - sm.sigma) / (2.0 * h);
  const double res_rho =
      std::abs(drho - (s.rho * s.rho + s.sigma * std::conj(s.sigma)));
  const double res_sigma =
      std::abs(dsigma - (s.rho + std::conj(s.rho)) * s.sigma);
  return {res_rho, res_sigma};
}

FocalSolution focal_distances(const OpticalScalars& s0) {
  const double theta0 = s0.theta();
  const double lambda0 = s0.twist();
  const double scale = std::max({std::abs(s0.rho), std::abs(s0.sigma), 1.0});
  FocalSolution out;
  if (std::abs(s0.kappa) < 1e-10 * scale * scale) {
    if (std::abs(theta0) < 1e-12 * scale) {
      out.kind = FocalKind::flat_empty;
      return out;
    }
    out.kind = FocalKind::flat_one;
    out.roots[0] = 1.0 / (2.0 * theta0);
    out.count = 1;
    return out;
  }
  const double disc = 4.0 * (std::norm(s0.sigma) - lambda0 * lambda0);
  const double tie = 1.0 + theta0 * theta0;
  if (disc < 0.0 && -disc >= 1e-10 * tie * tie) {
    out.kind = FocalKind::no_real;
    return out;
  }
  if (std::abs(disc) < 1e-10 * tie * tie) {
    out.kind = FocalKind::double_root;
    out.roots[0] = theta0 / s0.kappa;
    out.count = 1;
    return out;
  }
  const double root = std::sqrt(0.25 * disc);
  double r1 = (theta0 + root) / s0.kappa;
  double r2 = (theta0 - root) / s0.kappa;
  if (r1 > r2) std::swap(r1, r2);
  out.kind = FocalKind::two_real;
  out.roots = {r1, r2};
  out.count = 2;
  return out;
}

BasedScalars scalars_at_base(const ParametricCongruence& c, Complex mu) {
  constexpr double kBases[] = {0.0, 1.0, -1.0, 0.5, 2.0};
  std::string detail;
  for (double b : kBases) {
    try {
      return {optical_scalars(c, mu, b), b};
    } catch (const OpticsError& e) {
      if (e.code() != errc::focal_blowup) throw;
      detail = e.what();
    }
  }
  throw OpticsError(errc::focal_blowup,
                    "every base point is focal: " + detail);
}

Flatness classify_flatness(const ParametricCongruence& c, Complex mu) {
  const BasedScalars b = scalars_at_base(c, mu);
  const double scale =
      std::max({std::abs(b.scalars.rho), std::abs(b.scalars.sigma), 1.0});
  return std::abs(b.scalars.kappa) < 1e-10 * scale * scale ? Flatness::flat
                                                           : Flatness::non_flat;
}

double direction_jacobian_det(const ParametricCongruence& c, Complex mu) {
  const WirtingerDerivs w = c.derivs_at(mu);
  return std::norm(w.dxi) - std::norm(w.dbxi);
}

FocalSet focal_set(const ParametricCongruence& c,
                   std::span<const Complex> grid) {
  FocalSet out;
  for (Complex mu : grid) {
    try {
      const BasedScalars b = scalars_at_base(c, mu);
      const FocalSolution sol = focal_distances(b.scalars);
      const OrientedLine line = c.at(mu);
      for (int k = 0; k < sol.count; ++k) {
        const double r = b.base_r + sol.roots[k];
        out.points.push_back({mu, k, r, incidence(line, r)});
      }
    } catch (const OpticsError& e) {
      out.diagnostics.push_back({mu, e.code(), e.what()});
    }
  }
  return out;
}

namespace detail {

GridFormResult integrate_grid_form(const std::vector<double>& rx,
                                   const std::vector<double>& ry,
                                   const Grid2& grid, int i0, int j0,
                                   double r0) {
  GridFormResult out;
  out.r.assign(grid.size(), 0.0);
  const auto at = [&](const std::vector<double>& f, int i, int j) {
    return f[grid.index(i, j)];
  };
  out.r[grid.index(i0, j0)] = r0;
  // Along the seed row, then along every column.
  for (int i = i0 + 1; i < grid.nu; ++i) {
    out.r[grid.index(i, j0)] =
        at(out.r, i - 1, j0) +
        0.5 * (at(rx, i - 1, j0) + at(rx, i, j0)) * grid.du;
  }
  for (int i = i0 - 1; i >= 0; --i) {
    out.r[grid.index(i, j0)] =
        at(out.r, i + 1, j0) -
        0.5 * (at(rx, i + 1, j0) + at(rx, i, j0)) * grid.du;
  }
  for (int i = 0; i < grid.nu; ++i) {
    for (int j = j0 + 1; j < grid.nv; ++j) {
      out.r[grid.index(i, j)] =
          at(out.r, i, j - 1) +
          0.5 * (at(ry, i, j - 1) + at(ry, i, j)) * grid.dv;
    }
    for (int j = j0 - 1; j >= 0; --j) {
      out.r[grid.index(i, j)] =
          at(out.r, i, j + 1) -
          0.5 * (at(ry, i, j + 1) + at(ry, i, j)) * grid.dv;
    }
  }
  // Trapezoidal circulation around every cell; nonzero values measure how far
  // the sampled gradient is from closed at this resolution.
  for (int i = 0; i + 1 < grid.nu; ++i) {
    for (int j = 0; j + 1 < grid.nv; ++j) {
      const double loop =
          0.5 * (at(rx, i, j) + at(rx, i + 1, j)) * grid.du +
          0.5 * (at(ry, i + 1, j) + at(ry, i + 1, j + 1)) * grid.dv -
          0.5 * (at(rx, i, j + 1) + at(rx, i + 1, j + 1)) * grid.du -
          0.5 * (at(ry, i, j) + at(ry, i, j + 1)) * grid.dv;
      out.max_loop_residual = std::max(out.max_loop_residual, std::abs(loop));
    }
  }
  return out;
}

}  // namespace detail

WavefrontResult integrate_wavefront(const ParametricCongruence& c, Complex mu0,
                                    double r0, const Grid2& grid) {
  // Seed must sit on the lattice.
  const int i0 = static_cast<int>(std::lround((mu0.real() - grid.u0) /
                                              (grid.du != 0.0 ? grid.du : 1.0)));
  const int j0 = static_cast<int>(std::lround((mu0.imag() - grid.v0) /
                                              (grid.dv != 0.0 ? grid.dv : 1.0)));
  if (i0 < 0 || i0 >= grid.nu || j0 < 0 || j0 >= grid.nv ||
      std::abs(grid.mu_at(i0, j0) - mu0) >
          1e-9 * std::max(1.0, std::abs(mu0))) {
    throw std::invalid_argument("wavefront seed is not a grid node");
  }

  std::vector<double> rx(grid.size()), ry(grid.size());
  double max_twist = 0.0;
  for (int i = 0; i < grid.nu; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      const Complex mu = grid.mu_at(i, j);
      const BasedScalars b = scalars_at_base(c, mu);
      max_twist = std::max(max_twist, std::abs(b.scalars.twist()));
      const OrientedLine line = c.at(mu);
      const WirtingerDerivs w = c.derivs_at(mu);
      const double denom2 = (1.0 + std::norm(Complex(line.xi))) *
                            (1.0 + std::norm(Complex(line.xi)));
      // db r = (2 eta conj(dxi) + 2 conj(eta) dbxi) / (1 + |xi|^2)^2, so the
      // real gradient is (2 Re F, 2 Im F).
      const Complex f = (2.0 * line.eta * std::conj(w.dxi) +
                         2.0 * std::conj(line.eta) * w.dbxi) /
                        denom2;
      rx[grid.index(i, j)] = 2.0 * f.real();
      ry[grid.index(i, j)] = 2.0 * f.imag();
    }
  }
  if (max_twist >= 1e-8) {
    throw OpticsError(errc::twisted_congruence,
                      "congruence is twisted; no orthogonal wavefronts");
  }
  detail::GridFormResult integrated =
      detail::integrate_grid_form(rx, ry, grid, i0, j0, r0);
  if (integrated.max_loop_residual > 1e-6) {
    throw OpticsError(errc::non_integrable,
                      "wavefront gradient fails loop closure at this grid");
  }
  WavefrontResult out;
  out.grid = grid;
  out.r = std::move(integrated.r);
  out.max_loop_residual = integrated.max_loop_residual;
  return out;
}

}  // namespace catoptrica
