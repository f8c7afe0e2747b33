#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "catoptrica/congruence.hpp"
#include "catoptrica/cylinder.hpp"
#include "catoptrica/line_space.hpp"
#include "catoptrica/oracle.hpp"
#include "catoptrica/reflection.hpp"
#include "catoptrica/runner.hpp"
#include "runner_detail.hpp"

namespace catoptrica::cli {

namespace {

using detail_runner::parallel_for;

// Deterministic draws: engine output is standard-fixed and the bits-to-double
// mapping avoids distribution implementation differences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double a, double b) {
    const double x = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return a + (b - a) * x;
  }

  Complex disc(double radius) {
    for (;;) {
      const double x = uniform(-1.0, 1.0);
      const double y = uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) return {radius * x, radius * y};
    }
  }

 private:
  std::mt19937_64 gen_;
};

CheckResult make_check(std::string name, double value, double tolerance) {
  const bool pass = value <= tolerance;
  return {std::move(name), value, tolerance, pass};
}

double quadratic_residual(const OpticalScalars& s, double r) {
  const double q = 1.0 - 2.0 * s.theta() * r + s.kappa * r * r;
  const double scale =
      1.0 + 2.0 * std::abs(s.theta() * r) + std::abs(s.kappa) * r * r;
  return std::abs(q) / scale;
}

void line_model_checks(std::vector<CheckResult>& out) {
  Rng rng(0x00c0ffee0001ULL);
  double round_trip = 0.0;
  double straight = 0.0;
  double ortho = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const DirCoord xi(rng.disc(2.0));
    const OrientedLine line{xi, rng.disc(2.0)};
    const double r = rng.uniform(-5.0, 5.0);

    const Point3 p = incidence(line, r);
    const LineThroughResult back = line_through(p, xi);
    round_trip = std::max(round_trip, std::abs(back.line.eta - line.eta));
    round_trip = std::max(round_trip, std::abs(back.r - r));
    round_trip =
        std::max(round_trip, chordal_distance(vec_to_dir(dir_to_vec(xi)), xi));

    const double a = rng.uniform(-3.0, 3.0);
    const double b = rng.uniform(-3.0, 3.0);
    const Point3 pa = incidence(line, a);
    const Point3 pab = incidence(line, a + b);
    straight = std::max(
        straight, norm3(pab - (pa + b * dir_to_vec(xi).as_point())));

    ortho = std::max(ortho, std::abs(closest_point_orthogonality(line)));
  }
  out.push_back(make_check("line_round_trip", round_trip, 1e-12));
  out.push_back(make_check("line_straightness", straight, 1e-12));
  out.push_back(make_check("foot_orthogonality", ortho, 1e-12));
}

void transport_checks(std::vector<CheckResult>& out) {
  Rng rng(0x00c0ffee0002ULL);
  double residual = 0.0;
  for (int k = 0; k < 100; ++k) {
    const OpticalScalars s0 = OpticalScalars::from_rho_sigma(
        {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, rng.disc(1.5));
    const FocalSolution sol = focal_distances(s0);
    for (int m = 0; m < 10; ++m) {
      // Keep the stencil away from the poles: both in distance and in the
      // normalized size of the transport quadratic (which controls |rho|).
      double r = 0.0;
      bool found = false;
      for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
        r = rng.uniform(-2.0, 2.0);
        double dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < sol.count; ++i) {
          dist = std::min(dist, std::abs(r - sol.roots[i]));
        }
        found = dist > 0.5 && quadratic_residual(s0, r) > 0.1;
      }
      if (!found) continue;
      const auto [res_rho, res_sigma] = sachs_residual(s0, r, 1e-5);
      residual = std::max({residual, res_rho, res_sigma});
    }
  }
  out.push_back(make_check("transport_residual", residual, 1e-6));

  // Blow-up loci must coincide with the quadratic roots: Q ~ 0 there, the
  // transport throws, and Q is far from zero a step away. Samples are kept
  // well conditioned (separated roots, |kappa| bounded below) so the step
  // check is meaningful.
  double worst = 0.0;
  double violations = 0.0;
  int accepted = 0;
  while (accepted < 100) {
    const OpticalScalars s0 = OpticalScalars::from_rho_sigma(
        {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, rng.disc(1.5));
    const FocalSolution sol = focal_distances(s0);
    if (sol.kind != FocalKind::two_real) continue;
    if (std::abs(sol.roots[0] - sol.roots[1]) < 0.5) continue;
    if (std::abs(s0.kappa) < 0.5) continue;
    if (std::max(std::abs(sol.roots[0]), std::abs(sol.roots[1])) > 20.0)
      continue;
    ++accepted;
    for (int i = 0; i < sol.count; ++i) {
      const double root = sol.roots[i];
      worst = std::max(worst, quadratic_residual(s0, root));
      try {
        sachs_evolve(s0, root);
        violations += 1.0;  // expected to blow up exactly here
      } catch (const OpticsError& e) {
        if (e.code() != errc::focal_blowup) violations += 1.0;
      }
      for (double off : {-0.1, 0.1}) {
        if (quadratic_residual(s0, root + off) <= 1e-3) violations += 1.0;
      }
    }
  }
  out.push_back(
      make_check("transport_blowup_at_roots", worst + violations, 1e-9));
}

void classification_checks(std::vector<CheckResult>& out) {
  Rng rng(0x00c0ffee0003ULL);
  double violations = 0.0;
  for (int k = 0; k < 400; ++k) {
    const int mode = k % 4;
    OpticalScalars s0;
    if (mode == 0) {
      s0 = OpticalScalars::from_rho_sigma(
          {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, rng.disc(1.5));
    } else if (mode == 1) {
      // |sigma| = |rho|: kappa vanishes by construction.
      double theta = rng.uniform(-1.5, 1.5);
      if (std::abs(theta) < 0.2) theta = theta < 0.0 ? -0.2 : 0.2;
      const Complex rho{theta, rng.uniform(-1.5, 1.5)};
      const Complex sigma = std::polar(std::abs(rho), rng.uniform(0.0, 6.28));
      s0 = OpticalScalars::from_rho_sigma(rho, sigma);
    } else if (mode == 2) {
      // theta = 0 and |sigma| = |lambda|: flat with no focal point.
      const double lambda = rng.uniform(-1.5, 1.5);
      const Complex rho{0.0, lambda};
      const Complex sigma =
          std::polar(std::abs(lambda), rng.uniform(0.0, 6.28));
      s0 = OpticalScalars::from_rho_sigma(rho, sigma);
    } else {
      // |sigma| = |lambda| with theta != 0: coincident focal pair.
      double theta = rng.uniform(-1.5, 1.5);
      if (std::abs(theta) < 0.2) theta = theta < 0.0 ? -0.2 : 0.2;
      const double lambda = rng.uniform(-1.0, 1.0);
      const Complex rho{theta, lambda};
      const Complex sigma =
          std::polar(std::abs(lambda), rng.uniform(0.0, 6.28));
      s0 = OpticalScalars::from_rho_sigma(rho, sigma);
    }
    const FocalSolution sol = focal_distances(s0);
    const double disc = 4.0 * (std::norm(s0.sigma) - s0.twist() * s0.twist());
    const double tie = 1.0 + s0.theta() * s0.theta();
    const double scale =
        std::max({std::abs(s0.rho), std::abs(s0.sigma), 1.0});
    const bool flat = std::abs(s0.kappa) < 1e-10 * scale * scale;
    if (flat) {
      if (std::abs(s0.theta()) < 1e-12 * scale) {
        if (sol.kind != FocalKind::flat_empty || sol.count != 0) {
          violations += 1.0;
        }
      } else {
        if (sol.kind != FocalKind::flat_one || sol.count != 1 ||
            std::abs(sol.roots[0] - 1.0 / (2.0 * s0.theta())) >
                1e-12 * (1.0 + std::abs(sol.roots[0]))) {
          violations += 1.0;
        }
      }
      continue;
    }
    if (disc > 1e-10 * tie * tie) {
      if (sol.kind != FocalKind::two_real || sol.count != 2) {
        violations += 1.0;
      } else {
        for (int i = 0; i < 2; ++i) {
          if (quadratic_residual(s0, sol.roots[i]) >
              1e-10 * (1.0 + s0.theta() * s0.theta())) {
            violations += 1.0;
          }
        }
        if (!(sol.roots[0] <= sol.roots[1])) violations += 1.0;
      }
    } else if (disc < -1e-10 * tie * tie) {
      if (sol.kind != FocalKind::no_real || sol.count != 0) violations += 1.0;
    } else {
      if (sol.kind != FocalKind::double_root || sol.count != 1) {
        violations += 1.0;
      }
    }
  }
  out.push_back(
      {"focal_classification", violations, 0.0, violations == 0.0});
}

void reflection_checks(bool corrupt, std::vector<CheckResult>& out) {
  Rng rng(0x00c0ffee0004ULL);
  double fiber_cross = 0.0;
  double dir_vs_oracle = 0.0;
  double line_vs_oracle = 0.0;
  double equal_angle = 0.0;
  int n = 0;
  while (n < 1000) {
    const SurfaceFrame f{rng.disc(1.5), rng.disc(1.5), rng.uniform(-2.0, 2.0)};
    const Complex xi1 = rng.disc(1.5);
    const Complex denom = (1.0 - f.xi0 * std::conj(f.xi0)) * std::conj(xi1) -
                          2.0 * std::conj(f.xi0);
    if (std::abs(denom) < 0.05) continue;  // reflected ray near chart edge
    const UnitVec3 d = dir_to_vec(DirCoord(xi1));
    const UnitVec3 nrm = dir_to_vec(DirCoord(f.xi0));
    const double dn = dot(d, nrm);
    if (d.v - 2.0 * dn * nrm.v < -1.0 + 1e-3) continue;
    const SourceRay ray{xi1, -intersection_residual(f, {xi1, Complex(0.0)})};
    ++n;

    const ReflectedFiberForms forms = reflected_fiber_forms(f, ray);
    fiber_cross = std::max(
        fiber_cross, std::abs(forms.direct - forms.alt) /
                         std::max(1.0, std::abs(forms.direct)));

    OrientedLine law = reflect_line(f, ray);
    if (corrupt) {
      law.xi = DirCoord(Complex(law.xi) + Complex(1e-3, 0.0));
      law.eta += Complex(0.1, 0.0);
    }
    const OrientedLine vec = reflect_oracle(f, ray);
    dir_vs_oracle = std::max(dir_vs_oracle, chordal_distance(law.xi, vec.xi));
    for (double rr : {-1.0, 2.0}) {
      line_vs_oracle = std::max(
          line_vs_oracle, point_line_distance(incidence(vec, rr), law));
      line_vs_oracle = std::max(
          line_vs_oracle, point_line_distance(incidence(law, rr), vec));
    }
    const UnitVec3 dref = dir_to_vec(law.xi);
    equal_angle = std::max(equal_angle, std::abs(dn + dot(dref, nrm)));
  }
  out.push_back(make_check("reflection_fiber_cross_check", fiber_cross, 1e-9));
  out.push_back(
      make_check("reflection_direction_vs_oracle", dir_vs_oracle, 1e-10));
  out.push_back(make_check("reflection_line_vs_oracle", line_vs_oracle, 1e-9));
  out.push_back(make_check("equal_angle", equal_angle, 1e-12));
}

struct SweepAccumulator {
  double unit_dev = 0.0;
  double twist = 0.0;
  double src_residual = 0.0;
  double closed_agree = 0.0;
  int failures = 0;
  int total = 0;
};

void surface_checks(const ProfileCurve& profile, const Grid2& grid,
                    const std::vector<SignCombo>& combos, int threads,
                    std::vector<CheckResult>& out) {
  SweepAccumulator acc;
  for (const SignCombo& combo : combos) {
    const ParametricCongruence normals =
        normal_parametric(profile, combo.sign0);
    struct NodeOut {
      double unit_dev = 0.0, twist = 0.0, src = 0.0, agree = 0.0;
      bool failed = false;
    };
    std::vector<NodeOut> nodes(grid.size());
    parallel_for(grid.size(), threads, [&](int k) {
      const int i = k / grid.nv;
      const int j = k % grid.nv;
      const double u = grid.u_at(i);
      const double v = grid.v_at(j);
      NodeOut& node = nodes[k];
      try {
        const CylinderParam q{u, v, combo};
        const SurfaceFrame frame = normal_congruence(profile, q);
        node.unit_dev = std::abs(std::abs(frame.xi0) - 1.0);
        const BasedScalars bs = scalars_at_base(normals, Complex(u, v));
        node.twist = std::abs(bs.scalars.twist());
        const SourceRay ray = source_ray(profile, q);
        node.src = std::abs(intersection_residual(frame, ray));
        const OrientedLine closed = reflected_point_source(profile, q);
        const OrientedLine generic = reflect_line(frame, ray);
        node.agree =
            std::max(chordal_distance(closed.xi, generic.xi),
                     std::abs(closed.eta - generic.eta));
      } catch (const OpticsError&) {
        node.failed = true;
      }
    });
    for (const auto& node : nodes) {
      ++acc.total;
      if (node.failed) {
        ++acc.failures;
        continue;
      }
      acc.unit_dev = std::max(acc.unit_dev, node.unit_dev);
      acc.twist = std::max(acc.twist, node.twist);
      acc.src_residual = std::max(acc.src_residual, node.src);
      acc.closed_agree = std::max(acc.closed_agree, node.agree);
    }
  }
  out.push_back(make_check("normal_unit_direction", acc.unit_dev, 1e-12));
  out.push_back(make_check("normal_twist", acc.twist, 1e-9));
  out.push_back(make_check("source_ray_incidence", acc.src_residual, 1e-10));
  out.push_back(
      make_check("closed_reflection_agreement", acc.closed_agree, 1e-10));
  const double skipped =
      acc.total == 0 ? 1.0 : static_cast<double>(acc.failures) / acc.total;
  out.push_back(make_check("sweep_coverage_gap", skipped, 0.05));
}

void wavefront_checks(const ProfileCurve& profile, const Grid2& grid,
                      std::vector<CheckResult>& out) {
  try {
    const ParametricCongruence normals =
        normal_parametric(profile, Sign::plus);
    // The surface's own foot-point distances solve the same equation, so the
    // integrated wavefront may differ from them only by a constant (up to
    // trapezoidal truncation, bounded below).
    std::vector<double> surf_r(grid.size());
    for (int i = 0; i < grid.nu; ++i) {
      for (int j = 0; j < grid.nv; ++j) {
        const CylinderParam q{grid.u_at(i), grid.v_at(j),
                              {Sign::plus, Sign::plus}};
        surf_r[grid.index(i, j)] = normal_congruence(profile, q).r0;
      }
    }
    const double r0 = surf_r[grid.index(0, 0)];
    const WavefrontResult wf =
        integrate_wavefront(normals, grid.mu_at(0, 0), r0, grid);
    out.push_back(
        make_check("wavefront_loop_closure", wf.max_loop_residual, 1e-6));

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int k = 0; k < grid.size(); ++k) {
      const double diff = wf.r[k] - surf_r[k];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    const double drift = hi - lo;

    // A-priori trapezoid bound from the third differences of the surface
    // distances along u (they are v-independent for these congruences).
    double d3max = 0.0;
    if (grid.nu >= 4 && grid.du > 0.0) {
      for (int i = 2; i + 2 < grid.nu; ++i) {
        const double d3 =
            (surf_r[grid.index(i + 2, 0)] - 2.0 * surf_r[grid.index(i + 1, 0)] +
             2.0 * surf_r[grid.index(i - 1, 0)] -
             surf_r[grid.index(i - 2, 0)]) /
            (2.0 * grid.du * grid.du * grid.du);
        d3max = std::max(d3max, std::abs(d3));
      }
    }
    const double length = grid.du * (grid.nu - 1);
    const double bound =
        std::max(1e-8, 2.0 * grid.du * grid.du / 12.0 * d3max * length);
    out.push_back(
        make_check("wavefront_matches_surface_distance", drift, bound));
  } catch (const OpticsError&) {
    out.push_back(make_check("wavefront_loop_closure", 1.0, 1e-6));
    out.push_back(make_check("wavefront_matches_surface_distance", 1.0, 1e-8));
  }
}

void focal_checks(const ProfileCurve& profile, const Grid2& grid, int threads,
                  std::vector<CheckResult>& out) {
  const SignCombo combo{Sign::plus, Sign::plus};
  const ParametricCongruence c = reflected_parametric(profile, combo);

  double scene = 1.0;
  for (int i = 0; i < grid.nu; ++i) {
    scene = std::max(scene, std::abs(profile.z0(grid.u_at(i))));
  }
  scene = std::max({scene, std::abs(grid.v_at(0)),
                    std::abs(grid.v_at(grid.nv - 1))});
  // The scan covers |r| <= 10 * scene along each ray; focal points outside
  // this ball may sit beyond the window, so both clouds are restricted to it.
  const double window = 10.0 * scene;
  const double ball = 8.0 * scene;

  struct NodeOut {
    double match = 0.0;       // worst nearest-candidate distance at this node
    bool usable = false;
    std::vector<Point3> closed;  // closed-form points this node contributes
    std::vector<Point3> roots;
  };
  std::vector<NodeOut> nodes(grid.size());
  parallel_for(grid.size(), threads, [&](int k) {
    const int i = k / grid.nv;
    const int j = k % grid.nv;
    const double u = grid.u_at(i);
    const double v = grid.v_at(j);
    NodeOut& node = nodes[k];
    Point3 curve_pt;
    bool have_curve = false;
    try {
      curve_pt = focal_curve(profile, u);
      have_curve = true;
    } catch (const OpticsError&) {
    }
    Point3 surf_pt, surf_mirror;
    bool have_surf = false;
    try {
      surf_pt = focal_surface(profile, u, v);
      surf_mirror = focal_surface(profile, u, -v);
      have_surf = true;
    } catch (const OpticsError&) {
    }
    try {
      const BasedScalars bs = scalars_at_base(c, Complex(u, v));
      const FocalSolution sol = focal_distances(bs.scalars);
      // Near-coincident roots are exempt: their positions are ill conditioned
      // under the finite-difference scalars.
      const double disc =
          4.0 * (std::norm(bs.scalars.sigma) -
                 bs.scalars.twist() * bs.scalars.twist());
      const double tie = 1.0 + bs.scalars.theta() * bs.scalars.theta();
      if (sol.kind == FocalKind::two_real && std::abs(disc) < 1e-5 * tie * tie)
        return;
      const OrientedLine line = c.at(Complex(u, v));
      std::vector<Point3> candidates;
      if (have_curve) candidates.push_back(curve_pt);
      if (have_surf && sol.count == 2) {
        candidates.push_back(surf_pt);
        candidates.push_back(surf_mirror);
      }
      if (candidates.empty()) return;
      node.usable = true;
      for (int m = 0; m < sol.count; ++m) {
        const double r = bs.base_r + sol.roots[m];
        const Point3 pt = incidence(line, r);
        node.roots.push_back(pt);
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& cand : candidates) {
          best = std::min(best, norm3(pt - cand));
        }
        node.match = std::max(node.match, best);
      }
      // Coverage: the curve point must be realized by some root at its own
      // node; the surface point by the root pair when both roots exist.
      if (have_curve && sol.count > 0) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& pt : node.roots) {
          best = std::min(best, norm3(pt - curve_pt));
        }
        node.match = std::max(node.match, best);
        if (norm3(curve_pt) <= ball) node.closed.push_back(curve_pt);
      }
      if (have_surf && sol.count == 2) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& pt : node.roots) {
          best = std::min(best, std::min(norm3(pt - surf_pt),
                                         norm3(pt - surf_mirror)));
        }
        node.match = std::max(node.match, best);
        if (norm3(surf_pt) <= ball) node.closed.push_back(surf_pt);
      }
    } catch (const OpticsError&) {
    }
  });

  double match = 0.0;
  std::vector<Point3> closed_cloud;
  int usable = 0;
  for (const auto& node : nodes) {
    if (!node.usable) continue;
    ++usable;
    match = std::max(match, node.match);
    for (const Point3& pt : node.closed) closed_cloud.push_back(pt);
  }
  if (usable == 0) match = 1.0;
  out.push_back(make_check("focal_closed_vs_numeric", match, 1e-6));

  // Caustic scan over the same grid, compared with the closed-form cloud by
  // symmetric nearest-neighbour distance.
  const oracle::RayFamily fam = oracle::reflected_family(profile);
  std::vector<std::vector<Point3>> row_hits(grid.nu);
  parallel_for(grid.nu, threads, [&](int i) {
    Grid2 row = grid;
    row.u0 = grid.u_at(i);
    row.nu = 1;
    for (const auto& hit : oracle::caustic_scan(fam, row, -window, window, 64)) {
      if (norm3(hit.point) <= ball) row_hits[i].push_back(hit.point);
    }
  });
  std::vector<Point3> scan_cloud;
  for (const auto& row : row_hits) {
    scan_cloud.insert(scan_cloud.end(), row.begin(), row.end());
  }

  const auto directed = [](const std::vector<Point3>& a,
                           const std::vector<Point3>& b) {
    double worst = 0.0;
    for (const Point3& pa : a) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point3& pb : b) best = std::min(best, norm3(pa - pb));
      worst = std::max(worst, best);
    }
    return worst;
  };
  double hausdorff;
  if (scan_cloud.empty() || closed_cloud.empty()) {
    hausdorff = scan_cloud.empty() && closed_cloud.empty() ? 0.0 : 1.0;
  } else {
    hausdorff =
        std::max(directed(scan_cloud, closed_cloud),
                 directed(closed_cloud, scan_cloud));
  }
  out.push_back(make_check("caustic_scan_vs_closed", hausdorff, 1e-6));
}

}  // namespace

std::vector<CheckResult> run_verification(const RunConfig& cfg,
                                          const RunOptions& opt) {
  std::vector<CheckResult> out;
  const ProfileCurve profile = make_profile(cfg);
  const Grid2 grid = Grid2::linspace(cfg.u_min, cfg.u_max, cfg.u_samples,
                                     cfg.v_min, cfg.v_max, cfg.v_samples);
  const std::vector<SignCombo> combos =
      detail_runner::sweep_combos(opt.signs_all || cfg.signs_all);

  line_model_checks(out);
  transport_checks(out);
  classification_checks(out);
  reflection_checks(opt.corrupt_reflection, out);
  surface_checks(profile, grid, combos, opt.threads, out);
  wavefront_checks(profile, grid, out);
  focal_checks(profile, grid, opt.threads, out);
  return out;
}

}  // namespace catoptrica::cli
