#include "catoptrica/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>
#include <variant>

#include <json.hpp>

#include "catoptrica/cylinder.hpp"
#include "catoptrica/grid.hpp"
#include "catoptrica/line_space.hpp"
#include "runner_detail.hpp"

namespace catoptrica::cli {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail_runner {

namespace {

std::string cell_csv(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    return format_double(std::get<double>(c));
  }
  if (std::holds_alternative<int>(c)) {
    return std::to_string(std::get<int>(c));
  }
  if (std::holds_alternative<bool>(c)) {
    return std::get<bool>(c) ? "true" : "false";
  }
  return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    if (k) out += ',';
    out += t.columns[k];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += cell_csv(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t, const std::string& command) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["columns"] = t.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const Cell& c = row[k];
      if (std::holds_alternative<double>(c)) {
        obj[t.columns[k]] = std::get<double>(c);
      } else if (std::holds_alternative<int>(c)) {
        obj[t.columns[k]] = std::get<int>(c);
      } else if (std::holds_alternative<bool>(c)) {
        obj[t.columns[k]] = std::get<bool>(c);
      } else {
        obj[t.columns[k]] = std::get<std::string>(c);
      }
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= n) return;
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::string sanitize_detail(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

std::string diagnostics_csv(const std::vector<DiagRow>& diags) {
  std::string out = "u,v,code,detail\n";
  for (const auto& d : diags) {
    out += format_double(d.u);
    out += ',';
    out += format_double(d.v);
    out += ',';
    out += d.code;
    out += ',';
    out += sanitize_detail(d.detail);
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
  if (!f) throw std::runtime_error("failed writing output file: " + path);
}

std::string signs_text(SignCombo s) {
  return std::string{sign_char(s.sign0), sign_char(s.branch1)};
}

std::vector<SignCombo> sweep_combos(bool all) {
  if (!all) return {SignCombo{Sign::plus, Sign::plus}};
  return {SignCombo{Sign::plus, Sign::plus}, SignCombo{Sign::plus, Sign::minus},
          SignCombo{Sign::minus, Sign::plus},
          SignCombo{Sign::minus, Sign::minus}};
}

struct SweepResult {
  Table table;
  std::vector<DiagRow> diags;
};

SweepResult sweep_reflect(const ProfileCurve& profile, const Grid2& grid,
                          const std::vector<SignCombo>& combos, int threads) {
  SweepResult out;
  out.table.columns = {"u",      "v",      "xi_re", "xi_im", "eta_re",
                       "eta_im", "x1",     "x2",    "x3"};
  const bool tag_signs = combos.size() > 1;
  if (tag_signs) out.table.columns.push_back("signs");

  struct Node {
    std::vector<Cell> row;
    bool ok = false;
    DiagRow diag;
    bool failed = false;
  };
  for (const SignCombo& combo : combos) {
    std::vector<Node> nodes(grid.size());
    parallel_for(grid.size(), threads, [&](int k) {
      const int i = k / grid.nv;
      const int j = k % grid.nv;
      const double u = grid.u_at(i);
      const double v = grid.v_at(j);
      Node& node = nodes[k];
      try {
        const OrientedLine line = reflected_point_source(profile, {u, v, combo});
        const Point3 surface{profile.z0(u), v};
        node.row = {u,
                    v,
                    Complex(line.xi).real(),
                    Complex(line.xi).imag(),
                    line.eta.real(),
                    line.eta.imag(),
                    surface.x1(),
                    surface.x2(),
                    surface.x3()};
        if (tag_signs) node.row.push_back(signs_text(combo));
        node.ok = true;
      } catch (const OpticsError& e) {
        node.failed = true;
        node.diag = {u, v, errc_name(e.code()), e.what()};
      }
    });
    for (Node& node : nodes) {
      if (node.ok) out.table.rows.push_back(std::move(node.row));
      if (node.failed) out.diags.push_back(std::move(node.diag));
    }
  }
  return out;
}

SweepResult sweep_focal(const ProfileCurve& profile, const Grid2& grid,
                        const std::vector<SignCombo>& combos, bool numeric,
                        int threads) {
  SweepResult out;
  out.table.columns = {"u", "v", "branch", "virtual", "x1", "x2", "x3"};
  const bool tag_signs = combos.size() > 1;
  if (tag_signs) out.table.columns.push_back("signs");

  struct Node {
    std::vector<std::vector<Cell>> rows;
    std::vector<DiagRow> diags;
  };
  for (const SignCombo& combo : combos) {
    const ParametricCongruence c = reflected_parametric(profile, combo);
    std::vector<Node> nodes(grid.size());
    parallel_for(grid.size(), threads, [&](int k) {
      const int i = k / grid.nv;
      const int j = k % grid.nv;
      const double u = grid.u_at(i);
      const double v = grid.v_at(j);
      Node& node = nodes[k];

      const auto push = [&](const char* branch, bool virt, const Point3& pt) {
        std::vector<Cell> row{u,       v,       std::string(branch), virt,
                              pt.x1(), pt.x2(), pt.x3()};
        if (tag_signs) row.push_back(signs_text(combo));
        node.rows.push_back(std::move(row));
      };
      const auto diag = [&](errc code, const std::string& what) {
        node.diags.push_back({u, v, errc_name(code), what});
      };

      // Finite-difference focal roots; also used to resolve the virtual flag
      // of the closed-form rows.
      catoptrica::detail::FocalNodeResult roots =
          catoptrica::detail::focal_node(profile, c, combo, u, v);

      bool have_curve = false;
      Point3 curve_pt;
      try {
        curve_pt = focal_curve(profile, u);
        have_curve = true;
      } catch (const OpticsError& e) {
        diag(e.code(), e.what());
      }
      if (have_curve) {
        bool virt = false;
        try {
          const OrientedLine line = c.at(Complex(u, v));
          const Point3 surface{profile.z0(u), v};
          virt = affine_parameter(curve_pt, line) <
                 affine_parameter(surface, line);
        } catch (const OpticsError& e) {
          diag(e.code(), std::string("virtual flag unresolved: ") + e.what());
        }
        push("curve", virt, curve_pt);
      }

      try {
        const Point3 surf_pt = focal_surface(profile, u, v);
        // The surface row inherits the flag of the finite-difference root
        // that is not the curve root.
        bool virt = false;
        bool resolved = false;
        if (have_curve && roots.rows.size() == 2) {
          const double d0 = norm3(roots.rows[0].point - curve_pt);
          const double d1 = norm3(roots.rows[1].point - curve_pt);
          virt = (d0 < d1) ? roots.rows[1].virt : roots.rows[0].virt;
          resolved = true;
        } else if (roots.rows.size() == 1 && have_curve &&
                   norm3(roots.rows[0].point - curve_pt) >
                       1e-6 * std::max(1.0, norm3(curve_pt))) {
          virt = roots.rows[0].virt;
          resolved = true;
        }
        if (!resolved) {
          diag(errc::degenerate_focal,
               "virtual flag unresolved for the surface branch");
        }
        push("surface", virt, surf_pt);
      } catch (const OpticsError& e) {
        diag(e.code(), e.what());
      }

      if (numeric) {
        for (const auto& row : roots.rows) {
          push(row.branch == 0 ? "root0" : "root1", row.virt, row.point);
        }
        if (roots.failed) {
          diag(roots.diagnostic.code, roots.diagnostic.detail);
        }
      }
    });
    for (Node& node : nodes) {
      for (auto& row : node.rows) out.table.rows.push_back(std::move(row));
      for (auto& d : node.diags) out.diags.push_back(std::move(d));
    }
  }
  return out;
}

SweepResult sweep_wavefront(const ProfileCurve& profile, const Grid2& grid,
                            bool signs_all) {
  SweepResult out;
  out.table.columns = {"u", "v", "r", "x1", "x2", "x3"};
  if (signs_all) out.table.columns.push_back("signs");
  const std::vector<Sign> branches =
      signs_all ? std::vector<Sign>{Sign::plus, Sign::minus}
                : std::vector<Sign>{Sign::plus};
  for (Sign sign0 : branches) {
    const ParametricCongruence c = normal_parametric(profile, sign0);
    // Seed the integration on the surface itself: the foot parameter of the
    // first node's normal line.
    const CylinderParam q0{grid.u_at(0), grid.v_at(0), {sign0, Sign::plus}};
    const double r0 = normal_congruence(profile, q0).r0;
    const WavefrontResult wf =
        integrate_wavefront(c, grid.mu_at(0, 0), r0, grid);
    for (int i = 0; i < grid.nu; ++i) {
      for (int j = 0; j < grid.nv; ++j) {
        const double u = grid.u_at(i);
        const double v = grid.v_at(j);
        const double r = wf.r[grid.index(i, j)];
        const Point3 pt = incidence(c.at(grid.mu_at(i, j)), r);
        std::vector<Cell> row{u, v, r, pt.x1(), pt.x2(), pt.x3()};
        if (signs_all) {
          row.push_back(std::string{sign_char(sign0), '+'});
        }
        out.table.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

}  // namespace detail_runner

int run(Command cmd, const RunConfig& cfg, const RunOptions& opt,
        std::ostream& log) {
  using namespace detail_runner;
  try {
    const std::string out_path = !opt.out.empty() ? opt.out : cfg.out;
    const OutputFormat fmt = opt.format.value_or(cfg.format);
    const bool signs_all = opt.signs_all || cfg.signs_all;
    if (out_path.empty() && cmd != Command::verify) {
      log << "error: an output path is required (--out or config \"out\")\n";
      return 1;
    }
    const ProfileCurve profile = make_profile(cfg);
    const Grid2 grid = Grid2::linspace(cfg.u_min, cfg.u_max, cfg.u_samples,
                                       cfg.v_min, cfg.v_max, cfg.v_samples);
    const std::vector<SignCombo> combos = sweep_combos(signs_all);

    if (cmd == Command::verify) {
      RunOptions vopt = opt;
      vopt.signs_all = signs_all;
      const std::vector<CheckResult> checks = run_verification(cfg, vopt);
      int failed = 0;
      Table report;
      report.columns = {"check", "value", "tolerance", "pass"};
      for (const CheckResult& c : checks) {
        if (!c.pass) ++failed;
        char line[160];
        std::snprintf(line, sizeof(line), "%-32s value=%-13.6g tol=%-9.3g %s",
                      c.name.c_str(), c.value, c.tolerance,
                      c.pass ? "PASS" : "FAIL");
        log << line << "\n";
        report.rows.push_back(
            {c.name, c.value, c.tolerance, c.pass});
      }
      log << "verify: " << (checks.size() - failed) << "/" << checks.size()
          << " checks passed\n";
      if (!out_path.empty()) {
        write_file(out_path, fmt == OutputFormat::csv
                                 ? to_csv(report)
                                 : to_json(report, "verify"));
      }
      return failed == 0 ? 0 : 2;
    }

    SweepResult result;
    const char* name = "";
    if (cmd == Command::reflect) {
      result = sweep_reflect(profile, grid, combos, opt.threads);
      name = "reflect";
    } else if (cmd == Command::focal) {
      result = sweep_focal(profile, grid, combos, opt.numeric, opt.threads);
      name = "focal";
    } else {
      result = sweep_wavefront(profile, grid, signs_all);
      name = "wavefront";
    }
    write_file(out_path, fmt == OutputFormat::csv
                             ? to_csv(result.table)
                             : to_json(result.table, name));
    write_file(out_path + ".diagnostics.csv", diagnostics_csv(result.diags));
    log << name << ": wrote " << result.table.rows.size() << " rows to "
        << out_path << " (" << result.diags.size() << " diagnostics)\n";
    return 0;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  } catch (const OpticsError& e) {
    log << "error: [" << errc_name(e.code()) << "] " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace catoptrica::cli
