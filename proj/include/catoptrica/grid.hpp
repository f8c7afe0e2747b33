#pragma once

#include <vector>

#include "catoptrica/types.hpp"

namespace catoptrica {

// Rectangular lattice in the (u, v) parameter plane, also used as a lattice
// of complex parameters mu = u + i v. Indexing is row-major with u outermost.
struct Grid2 {
  double u0 = 0.0;
  double v0 = 0.0;
  double du = 0.0;
  double dv = 0.0;
  int nu = 0;
  int nv = 0;

  static Grid2 linspace(double u_min, double u_max, int nu, double v_min,
                        double v_max, int nv) {
    Grid2 g;
    g.u0 = u_min;
    g.v0 = v_min;
    g.nu = nu;
    g.nv = nv;
    g.du = nu > 1 ? (u_max - u_min) / (nu - 1) : 0.0;
    g.dv = nv > 1 ? (v_max - v_min) / (nv - 1) : 0.0;
    return g;
  }

  double u_at(int i) const { return u0 + i * du; }
  double v_at(int j) const { return v0 + j * dv; }
  Complex mu_at(int i, int j) const { return {u_at(i), v_at(j)}; }
  int index(int i, int j) const { return i * nv + j; }
  int size() const { return nu * nv; }

  std::vector<Complex> nodes() const {
    std::vector<Complex> out;
    out.reserve(size());
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) out.push_back(mu_at(i, j));
    return out;
  }
};

}  // namespace catoptrica
