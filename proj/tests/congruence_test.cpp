#include "catoptrica/congruence.hpp"

#include <cmath>
#include <random>

#include "catoptrica/line_space.hpp"
#include "doctest.h"

using namespace catoptrica;

namespace {

double uniform(std::mt19937_64& g, double a, double b) {
  return a + (b - a) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

Complex disc(std::mt19937_64& g, double radius) {
  for (;;) {
    const double x = uniform(g, -1.0, 1.0);
    const double y = uniform(g, -1.0, 1.0);
    if (x * x + y * y <= 1.0) return {radius * x, radius * y};
  }
}

// All lines through the origin, direction mu. A perfect point focus: the
// divergence is -1/r from the focus and the shear vanishes.
ParametricCongruence point_source() {
  return ParametricCongruence(
      [](Complex mu) { return OrientedLine{DirCoord(mu), Complex(0.0)}; });
}

errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const OpticsError& e) {
    return e.code();
  }
  FAIL("expected an OpticsError");
  return errc::config_error;
}

}  // namespace

TEST_CASE("point source congruence has pure divergence -1/r") {
  const ParametricCongruence c = point_source();
  for (double r : {0.5, 2.0, -1.5}) {
    const OpticalScalars s = optical_scalars(c, {0.3, -0.4}, r);
    CHECK(std::abs(s.rho - Complex(-1.0 / r, 0.0)) < 1e-9);
    CHECK(std::abs(s.sigma) < 1e-9);
  }
  // The focus itself blows up.
  CHECK(code_of([&] { optical_scalars(c, {0.3, -0.4}, 0.0); }) ==
        errc::focal_blowup);
  // ... and is recovered as a coincident focal pair from any base point.
  const OpticalScalars s = optical_scalars(c, {0.1, 0.2}, 2.0);
  const FocalSolution sol = focal_distances(s);
  CHECK(sol.kind == FocalKind::double_root);
  REQUIRE(sol.count == 1);
  CHECK(std::abs(sol.roots[0] - (-2.0)) < 1e-7);
}

TEST_CASE("transport closed form evaluated by hand") {
  // rho0 = -1, sigma0 = 0: rho(r) = -1/(1+r).
  const OpticalScalars converge = OpticalScalars::from_rho_sigma(
      {-1.0, 0.0}, {0.0, 0.0});
  const OpticalScalars a = sachs_evolve(converge, 1.0);
  CHECK(std::abs(a.rho - Complex(-0.5, 0.0)) < 1e-15);
  CHECK(std::abs(a.sigma) < 1e-15);

  // rho0 = 0, sigma0 = 1: Q = 1 - r^2, so at r = 1/2 rho = 2/3, sigma = 4/3.
  const OpticalScalars sheared = OpticalScalars::from_rho_sigma(
      {0.0, 0.0}, {1.0, 0.0});
  const OpticalScalars b = sachs_evolve(sheared, 0.5);
  CHECK(std::abs(b.rho - Complex(2.0 / 3.0, 0.0)) < 1e-15);
  CHECK(std::abs(b.sigma - Complex(4.0 / 3.0, 0.0)) < 1e-15);
  CHECK(code_of([&] { sachs_evolve(sheared, 1.0); }) == errc::focal_blowup);
}

TEST_CASE("transport satisfies its own differential equations") {
  std::mt19937_64 gen(11);
  for (int k = 0; k < 200; ++k) {
    const OpticalScalars s0 = OpticalScalars::from_rho_sigma(
        {uniform(gen, -1.0, 1.0), uniform(gen, -1.0, 1.0)}, disc(gen, 1.0));
    const FocalSolution sol = focal_distances(s0);
    double r = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      r = uniform(gen, -1.5, 1.5);
      ok = true;
      for (int i = 0; i < sol.count; ++i) {
        if (std::abs(r - sol.roots[i]) < 0.5) ok = false;
      }
      const double q = 1.0 - 2.0 * s0.theta() * r + s0.kappa * r * r;
      if (std::abs(q) < 0.1) ok = false;
    }
    if (!ok) continue;
    const auto [res_rho, res_sigma] = sachs_residual(s0, r, 1e-5);
    CHECK(res_rho < 1e-6);
    CHECK(res_sigma < 1e-6);
  }
}

TEST_CASE("transport rebases exactly") {
  // Evolving to b and then by d is evolving to b + d; the transition
  // functions compose because Q0(b + d) = Q0(b) Qb(d).
  std::mt19937_64 gen(12);
  int checked = 0;
  while (checked < 200) {
    const OpticalScalars s0 = OpticalScalars::from_rho_sigma(
        {uniform(gen, -1.0, 1.0), uniform(gen, -1.0, 1.0)}, disc(gen, 1.0));
    const double b = uniform(gen, -1.0, 1.0);
    const double d = uniform(gen, -1.0, 1.0);
    try {
      const OpticalScalars two_step = sachs_evolve(sachs_evolve(s0, b), d);
      const OpticalScalars one_step = sachs_evolve(s0, b + d);
      const double scale =
          std::max({1.0, std::abs(one_step.rho), std::abs(one_step.sigma)});
      CHECK(std::abs(two_step.rho - one_step.rho) < 1e-10 * scale);
      CHECK(std::abs(two_step.sigma - one_step.sigma) < 1e-10 * scale);
      ++checked;
    } catch (const OpticsError&) {
      // Stepped onto a focal point; draw again.
    }
  }
}

TEST_CASE("focal classification on constructed inputs") {
  // Two clean roots.
  const FocalSolution generic = focal_distances(
      OpticalScalars::from_rho_sigma({1.0, 0.0}, {0.5, 0.0}));
  CHECK(generic.kind == FocalKind::two_real);
  REQUIRE(generic.count == 2);
  // theta=1, |sigma|=1/2, kappa=3/4: roots (1 +/- 1/2)/(3/4) = 2/3 and 2.
  CHECK(std::abs(generic.roots[0] - 2.0 / 3.0) < 1e-14);
  CHECK(std::abs(generic.roots[1] - 2.0) < 1e-14);

  // Twist dominating shear: no real focal points.
  const FocalSolution spun = focal_distances(
      OpticalScalars::from_rho_sigma({0.2, 1.0}, {0.3, 0.0}));
  CHECK(spun.kind == FocalKind::no_real);
  CHECK(spun.count == 0);

  // |sigma| = |lambda| with theta != 0: coincident pair at theta/kappa.
  const FocalSolution pinched = focal_distances(
      OpticalScalars::from_rho_sigma({1.0, 0.4}, {0.0, 0.4}));
  CHECK(pinched.kind == FocalKind::double_root);
  REQUIRE(pinched.count == 1);
  CHECK(std::abs(pinched.roots[0] - 1.0) < 1e-14);

  // kappa = 0 with theta != 0: the single flat root 1/(2 theta).
  const FocalSolution flat = focal_distances(OpticalScalars::from_rho_sigma(
      {0.5, 0.1}, std::sqrt(0.26) * std::polar(1.0, 0.7)));
  CHECK(flat.kind == FocalKind::flat_one);
  REQUIRE(flat.count == 1);
  CHECK(std::abs(flat.roots[0] - 1.0) < 1e-12);

  // kappa = 0 and theta = 0: nothing at finite distance.
  const FocalSolution empty = focal_distances(OpticalScalars::from_rho_sigma(
      {0.0, 0.3}, 0.3 * std::polar(1.0, 2.1)));
  CHECK(empty.kind == FocalKind::flat_empty);
  CHECK(empty.count == 0);
}

TEST_CASE("focal roots actually zero the transport quadratic") {
  std::mt19937_64 gen(13);
  for (int k = 0; k < 500; ++k) {
    const OpticalScalars s0 = OpticalScalars::from_rho_sigma(
        {uniform(gen, -1.5, 1.5), uniform(gen, -1.5, 1.5)}, disc(gen, 1.5));
    const FocalSolution sol = focal_distances(s0);
    if (sol.kind != FocalKind::two_real) continue;
    for (int i = 0; i < sol.count; ++i) {
      const double r = sol.roots[i];
      const double q = 1.0 - 2.0 * s0.theta() * r + s0.kappa * r * r;
      const double scale =
          1.0 + 2.0 * std::abs(s0.theta() * r) + std::abs(s0.kappa) * r * r;
      CHECK(std::abs(q) < 1e-10 * scale);
    }
  }
}

TEST_CASE("scalars at an alternative base when the foot is focal") {
  // The point-source foot r=0 is the focus; the base search must move on and
  // report roots as offsets from the base it settled at.
  const ParametricCongruence c = point_source();
  const BasedScalars b = scalars_at_base(c, {0.4, 0.1});
  CHECK(b.base_r != 0.0);
  const FocalSolution sol = focal_distances(b.scalars);
  REQUIRE(sol.count == 1);
  CHECK(std::abs(b.base_r + sol.roots[0]) < 1e-7);  // back at the source
}

TEST_CASE("finite differences agree with analytic derivatives") {
  // Same family built twice: closed-form Wirtinger derivatives against the
  // central-difference fallback.
  const auto eval = [](Complex mu) {
    const Complex xi = mu + 0.3 * std::conj(mu) * std::conj(mu);
    const Complex eta = Complex(0.0, 1.0) * mu * std::conj(mu) + 0.5 * mu;
    return OrientedLine{DirCoord(xi), eta};
  };
  const auto derivs = [](Complex mu) {
    WirtingerDerivs w;
    w.dxi = 1.0;
    w.dbxi = 0.6 * std::conj(mu);
    w.deta = Complex(0.0, 1.0) * std::conj(mu) + 0.5;
    w.dbeta = Complex(0.0, 1.0) * mu;
    return w;
  };
  const ParametricCongruence numeric(eval);
  const ParametricCongruence analytic(eval, derivs);
  std::mt19937_64 gen(14);
  for (int k = 0; k < 100; ++k) {
    const Complex mu = disc(gen, 1.5);
    const WirtingerDerivs fd = numeric.derivs_at(mu);
    const WirtingerDerivs ex = analytic.derivs_at(mu);
    CHECK(std::abs(fd.dxi - ex.dxi) < 1e-6);
    CHECK(std::abs(fd.dbxi - ex.dbxi) < 1e-6);
    CHECK(std::abs(fd.deta - ex.deta) < 1e-6);
    CHECK(std::abs(fd.dbeta - ex.dbeta) < 1e-6);
  }
}

TEST_CASE("direction jacobian ranks the direction map") {
  // xi = mu is orientation-preserving rank 2; xi = conj(mu) reverses it; a
  // u-only map drops rank.
  const ParametricCongruence fwd(
      [](Complex mu) { return OrientedLine{DirCoord(mu), Complex(0.0)}; });
  CHECK(direction_jacobian_det(fwd, {0.2, 0.3}) > 0.99);
  const ParametricCongruence rev([](Complex mu) {
    return OrientedLine{DirCoord(std::conj(mu)), Complex(0.0)};
  });
  CHECK(direction_jacobian_det(rev, {0.2, 0.3}) < -0.99);
  const ParametricCongruence folded([](Complex mu) {
    return OrientedLine{DirCoord(Complex(mu.real(), 0.0)), Complex(0.0)};
  });
  CHECK(std::abs(direction_jacobian_det(folded, {0.2, 0.3})) < 1e-6);
}

TEST_CASE("grid form integration is exact for quadratic data") {
  // r = u^2 + u v has gradient (2u + v, u); trapezoids integrate linear
  // integrands exactly and the mixed partials close every loop.
  const Grid2 g = Grid2::linspace(-1.0, 1.0, 9, 0.0, 2.0, 7);
  std::vector<double> rx(g.size()), ry(g.size()), expect(g.size());
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      const double u = g.u_at(i), v = g.v_at(j);
      rx[g.index(i, j)] = 2.0 * u + v;
      ry[g.index(i, j)] = u;
      expect[g.index(i, j)] = u * u + u * v;
    }
  }
  const auto got = detail::integrate_grid_form(rx, ry, g, 4, 3, expect[g.index(4, 3)]);
  CHECK(got.max_loop_residual < 1e-13);
  for (int k = 0; k < g.size(); ++k) {
    CHECK(std::abs(got.r[k] - expect[k]) < 1e-12);
  }
}

TEST_CASE("grid form integration reports an open loop") {
  // One cell, rx = 0 everywhere, ry = 1 on the right edge only: circulation 1.
  const Grid2 g = Grid2::linspace(0.0, 1.0, 2, 0.0, 1.0, 2);
  const std::vector<double> rx(4, 0.0);
  std::vector<double> ry(4, 0.0);
  ry[g.index(1, 0)] = 1.0;
  ry[g.index(1, 1)] = 1.0;
  const auto got = detail::integrate_grid_form(rx, ry, g, 0, 0, 0.0);
  CHECK(got.max_loop_residual == doctest::Approx(1.0));
  CHECK(got.r[g.index(0, 1)] == 0.0);
  CHECK(got.r[g.index(1, 1)] == doctest::Approx(1.0));
}

TEST_CASE("wavefront integration of a twisted family is refused") {
  // eta = i a conj(mu) makes the twist equal a along the real axis.
  const ParametricCongruence c([](Complex mu) {
    return OrientedLine{DirCoord(mu), Complex(0.0, 0.5) * std::conj(mu)};
  });
  const Grid2 g = Grid2::linspace(0.0, 1.0, 2, 0.0, 1.0, 2);
  CHECK(code_of([&] { integrate_wavefront(c, {0.0, 0.0}, 0.0, g); }) ==
        errc::twisted_congruence);
}

TEST_CASE("wavefront integration refuses a non-closed gradient") {
  // Hand-built family: node values put weight ic at the far corner (loop
  // circulation 2c/9 over the single cell) while the declared derivatives
  // cancel the twist at every node, so only loop closure can object.
  const double c = 1.0;
  const auto eval = [c](Complex mu) {
    return OrientedLine{DirCoord(mu),
                        Complex(0.0, c) * mu.real() * mu.imag()};
  };
  const auto derivs = [c](Complex mu) {
    WirtingerDerivs w;
    w.dxi = 1.0;
    w.dbxi = 0.0;
    w.deta = 1.0;
    w.dbeta = 5.0;
    if (std::abs(mu - Complex(1.0, 1.0)) < 1e-9) {
      // Match the twist contributed by eta = ic at this node.
      w.deta = Complex(1.0, 2.0 * c / 3.0);
    }
    return w;
  };
  const ParametricCongruence family(eval, derivs);
  const Grid2 g = Grid2::linspace(0.0, 1.0, 2, 0.0, 1.0, 2);
  CHECK(code_of([&] { integrate_wavefront(family, {0.0, 0.0}, 0.0, g); }) ==
        errc::non_integrable);
}

TEST_CASE("wavefront seed must be a grid node") {
  const ParametricCongruence c = point_source();
  const Grid2 g = Grid2::linspace(0.0, 1.0, 3, 0.0, 1.0, 3);
  CHECK_THROWS_AS(integrate_wavefront(c, {0.25, 0.0}, 1.0, g),
                  std::invalid_argument);
}

TEST_CASE("garbage scalars cannot escape near a focus") {
  // Probing distances inside the blow-up gate must throw, not return huge
  // finite values that would misclassify downstream.
  const ParametricCongruence c = point_source();
  for (double r : {1e-12, -1e-11, 1e-10}) {
    CHECK(code_of([&] { optical_scalars(c, {0.2, 0.1}, r); }) ==
          errc::focal_blowup);
  }
}
