#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catoptrica/grid.hpp"
#include "catoptrica/line_space.hpp"
#include "catoptrica/types.hpp"

namespace catoptrica {

inline constexpr double kDefaultFdStep = 1e-5;

// Wirtinger derivatives of (xi, eta) with respect to the congruence
// parameter mu: d = d/dmu, db = d/dconj(mu).
struct WirtingerDerivs {
  Complex dxi{0.0, 0.0};
  Complex dbxi{0.0, 0.0};
  Complex deta{0.0, 0.0};
  Complex dbeta{0.0, 0.0};
};

// Two-parameter family of oriented lines mu -> (xi(mu), eta(mu)).
// Derivatives come from an analytic callback when supplied, otherwise from
// central finite differences with step fd_step * max(1, |mu|).
class ParametricCongruence {
 public:
  using Eval = std::function<OrientedLine(Complex)>;
  using Derivs = std::function<WirtingerDerivs(Complex)>;

  explicit ParametricCongruence(Eval eval, Derivs derivs = nullptr,
                                double fd_step = kDefaultFdStep)
      : eval_(std::move(eval)), derivs_(std::move(derivs)), fd_step_(fd_step) {}

  OrientedLine at(Complex mu) const;
  WirtingerDerivs derivs_at(Complex mu) const;
  bool has_analytic_derivs() const { return static_cast<bool>(derivs_); }
  double fd_step() const { return fd_step_; }

 private:
  Eval eval_;
  Derivs derivs_;
  double fd_step_;
};

// Divergence + twist (rho = theta + i lambda), shear (sigma) and the
// curvature combination kappa = |rho|^2 - |sigma|^2 of a congruence at a
// point of one of its lines.
struct OpticalScalars {
  Complex rho{0.0, 0.0};
  Complex sigma{0.0, 0.0};
  double kappa = 0.0;

  static OpticalScalars from_rho_sigma(Complex rho, Complex sigma) {
    return {rho, sigma, std::norm(rho) - std::norm(sigma)};
  }
  double theta() const { return rho.real(); }
  double twist() const { return rho.imag(); }
};

enum class FocalKind {
  flat_empty,   // kappa = 0, theta = 0: no focal point at finite distance
  flat_one,     // kappa = 0, theta != 0: single focal point
  no_real,      // |sigma|^2 < lambda^2: no real roots
  double_root,  // coincident pair
  two_real,
};

struct FocalSolution {
  FocalKind kind = FocalKind::flat_empty;
  std::array<double, 2> roots{};  // ascending; first `count` entries valid
  int count = 0;
};

enum class Flatness { flat, non_flat };

// Directional derivatives of eta along the line at parameter r; these are the
// raw ingredients of the optical scalars.
Complex d_plus_eta(const ParametricCongruence& c, Complex mu, double r);
Complex d_minus_eta(const ParametricCongruence& c, Complex mu, double r);

// Optical scalars of the congruence at distance r along the line mu.
// Throws errc::focal_blowup when the defining denominator vanishes (the point
// is focal).
OpticalScalars optical_scalars(const ParametricCongruence& c, Complex mu,
                               double r);

// Transport of the scalars a distance r along the line (closed form):
//   rho(r)   = (rho0 - kappa r) / Q(r)
//   sigma(r) = sigma0 / Q(r),  Q(r) = 1 - 2 theta0 r + kappa r^2.
// Throws errc::focal_blowup when Q(r) vanishes.
OpticalScalars sachs_evolve(const OpticalScalars& s0, double r);

// Finite-difference residuals of the transport equations at r:
//   |d rho/dr - (rho^2 + sigma conj(sigma))| and |d sigma/dr - (rho +
//   conj(rho)) sigma|,
// with centered differences of step h. r and r +/- h must avoid focal roots.
std::pair<double, double> sachs_residual(const OpticalScalars& s0, double r,
                                         double h);

// Real solutions of Q(r) = 0, classified. Flatness means kappa = 0 within
// 1e-10 * max(|rho0|, |sigma0|, 1)^2; a coincident pair is declared when the
// discriminant 4(|sigma0|^2 - lambda0^2) is below 1e-10 * (1 + theta0^2)^2.
FocalSolution focal_distances(const OpticalScalars& s0);

// Scalars evaluated at the first non-focal base point from {0, 1, -1, 1/2, 2}
// along the line. Focal roots of the returned scalars are offsets from
// base_r.
struct BasedScalars {
  OpticalScalars scalars;
  double base_r = 0.0;
};
BasedScalars scalars_at_base(const ParametricCongruence& c, Complex mu);

// Whether the congruence is focal-surface-flat along the line mu (kappa = 0,
// which is invariant under transport).
Flatness classify_flatness(const ParametricCongruence& c, Complex mu);

// Jacobian determinant of the direction map mu -> xi as a map of the real
// plane: |dxi|^2 - |dbxi|^2. Rank drop diagnostic for degenerate direction
// charts.
double direction_jacobian_det(const ParametricCongruence& c, Complex mu);

struct FocalPoint {
  Complex mu;
  int branch = 0;  // index of the root at this parameter, ascending in r
  double r = 0.0;  // affine parameter of the focal point on the line
  Point3 point;
};

struct GridDiagnostic {
  Complex mu;
  errc code;
  std::string detail;
};

struct FocalSet {
  std::vector<FocalPoint> points;
  std::vector<GridDiagnostic> diagnostics;
};

// Focal points of the congruence over a list of parameters. Per-point
// failures are collected as diagnostics, never thrown.
FocalSet focal_set(const ParametricCongruence& c, std::span<const Complex> grid);

struct WavefrontResult {
  Grid2 grid;
  std::vector<double> r;  // row-major, grid.index(i, j)
  double max_loop_residual = 0.0;
};

// Integrates the wavefront equation for r(mu) over the grid from the node at
// mu0 (which must coincide with a grid node) with r(mu0) = r0, by trapezoidal
// accumulation along the mu0 row and then along columns.
// Throws errc::twisted_congruence when |twist| >= 1e-8 at any node and
// errc::non_integrable when a cell's loop closure residual exceeds 1e-6.
WavefrontResult integrate_wavefront(const ParametricCongruence& c, Complex mu0,
                                    double r0, const Grid2& grid);

namespace detail {

// Trapezoidal integration of a gradient sampled on grid nodes (rx = dr/du,
// ry = dr/dv), seeded at node (i0, j0). Returns the integrated values and the
// largest per-cell loop closure residual.
struct GridFormResult {
  std::vector<double> r;
  double max_loop_residual = 0.0;
};
GridFormResult integrate_grid_form(const std::vector<double>& rx,
                                   const std::vector<double>& ry,
                                   const Grid2& grid, int i0, int j0,
                                   double r0);

}  // namespace detail

}  // namespace catoptrica
