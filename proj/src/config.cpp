#include "catoptrica/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace catoptrica::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      fail(where.empty() ? item.key() : where + "." + item.key(),
           "unknown field");
    }
  }
}

double require_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(field, "expected a finite number");
  return x;
}

int require_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

// Complex values are written as a plain number (real axis) or [re, im].
Complex require_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {require_number(j, field), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {require_number(j[0], field), require_number(j[1], field)};
  }
  fail(field, "expected a number or [re, im]");
}

std::pair<double, double> require_range(const json& j,
                                        const std::string& field) {
  if (!j.is_array() || j.size() != 2) fail(field, "expected [min, max]");
  const double lo = require_number(j[0], field);
  const double hi = require_number(j[1], field);
  if (!(lo < hi)) fail(field, "range must satisfy min < max");
  return {lo, hi};
}

ProfileSpec parse_profile(const json& j) {
  if (!j.is_object()) fail("profile", "expected an object");
  if (!j.contains("type")) fail("profile.type", "missing");
  if (!j["type"].is_string()) fail("profile.type", "expected a string");
  const std::string type = j["type"].get<std::string>();
  ProfileSpec spec;
  if (type == "circle") {
    spec.kind = ProfileKind::circle;
    reject_unknown(j, "profile", {"type", "R", "center"});
    if (!j.contains("R")) fail("profile.R", "missing");
    spec.radius = require_number(j["R"], "profile.R");
    if (spec.radius <= 0.0) fail("profile.R", "must be positive");
    if (j.contains("center")) {
      spec.center = require_complex(j["center"], "profile.center");
    }
  } else if (type == "ellipse") {
    spec.kind = ProfileKind::ellipse;
    reject_unknown(j, "profile", {"type", "a", "b"});
    for (const char* axis : {"a", "b"}) {
      if (!j.contains(axis)) fail(std::string("profile.") + axis, "missing");
    }
    spec.a = require_number(j["a"], "profile.a");
    spec.b = require_number(j["b"], "profile.b");
    if (spec.a <= 0.0 || spec.b <= 0.0) fail("profile.a", "must be positive");
  } else if (type == "parabola") {
    spec.kind = ProfileKind::parabola;
    reject_unknown(j, "profile", {"type", "f", "vertex_offset"});
    if (!j.contains("f")) fail("profile.f", "missing");
    spec.focal_length = require_number(j["f"], "profile.f");
    if (spec.focal_length <= 0.0) fail("profile.f", "must be positive");
    if (j.contains("vertex_offset")) {
      spec.vertex_offset =
          require_number(j["vertex_offset"], "profile.vertex_offset");
    }
  } else if (type == "polynomial") {
    spec.kind = ProfileKind::polynomial;
    reject_unknown(j, "profile", {"type", "coeffs"});
    if (!j.contains("coeffs") || !j["coeffs"].is_array() ||
        j["coeffs"].empty()) {
      fail("profile.coeffs", "expected a nonempty array of coefficients");
    }
    for (const auto& c : j["coeffs"]) {
      spec.coeffs.push_back(require_complex(c, "profile.coeffs"));
    }
  } else {
    fail("profile.type",
         "unknown profile '" + type +
             "' (expected circle, ellipse, parabola or polynomial)");
  }
  return spec;
}

void default_u_range(RunConfig& cfg) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  switch (cfg.profile.kind) {
    case ProfileKind::circle:
    case ProfileKind::ellipse:
      cfg.u_min = 0.0;
      cfg.u_max = kTwoPi;
      break;
    case ProfileKind::parabola:
      cfg.u_min = -2.0;
      cfg.u_max = 2.0;
      break;
    case ProfileKind::polynomial:
      cfg.u_min = -1.0;
      cfg.u_max = 1.0;
      break;
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t k = 0; k < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') ++line;
    }
    std::ostringstream os;
    os << "config is not valid JSON (line " << line << "): " << e.what();
    throw ConfigError(os.str());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(doc, "",
                 {"profile", "u_range", "v_range", "u_samples", "v_samples",
                  "signs", "out", "format"});
  if (!doc.contains("profile")) fail("profile", "missing");

  RunConfig cfg;
  cfg.profile = parse_profile(doc["profile"]);
  default_u_range(cfg);
  if (doc.contains("u_range")) {
    std::tie(cfg.u_min, cfg.u_max) = require_range(doc["u_range"], "u_range");
  }
  if (doc.contains("v_range")) {
    std::tie(cfg.v_min, cfg.v_max) = require_range(doc["v_range"], "v_range");
  }
  if (doc.contains("u_samples")) {
    cfg.u_samples = require_int(doc["u_samples"], "u_samples");
  }
  if (doc.contains("v_samples")) {
    cfg.v_samples = require_int(doc["v_samples"], "v_samples");
  }
  if (cfg.u_samples < 2) fail("u_samples", "must be at least 2");
  if (cfg.v_samples < 2) fail("v_samples", "must be at least 2");
  if (doc.contains("signs")) {
    if (!doc["signs"].is_string()) fail("signs", "expected a string");
    const std::string signs = doc["signs"].get<std::string>();
    if (signs == "all") {
      cfg.signs_all = true;
    } else if (signs == "PlusPlus") {
      cfg.signs_all = false;
    } else {
      fail("signs", "expected \"PlusPlus\" or \"all\"");
    }
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) fail("out", "expected a string");
    cfg.out = doc["out"].get<std::string>();
  }
  if (doc.contains("format")) {
    if (!doc["format"].is_string()) fail("format", "expected a string");
    const std::string fmt = doc["format"].get<std::string>();
    if (fmt == "csv") {
      cfg.format = OutputFormat::csv;
    } else if (fmt == "json") {
      cfg.format = OutputFormat::json;
    } else {
      fail("format", "expected \"csv\" or \"json\"");
    }
  }
  return cfg;
}

ProfileCurve make_profile(const RunConfig& cfg) {
  const ProfileSpec& p = cfg.profile;
  switch (p.kind) {
    case ProfileKind::circle:
      return ProfileCurve::circle(p.center, p.radius, cfg.u_min, cfg.u_max);
    case ProfileKind::ellipse:
      return ProfileCurve::ellipse(p.a, p.b, cfg.u_min, cfg.u_max);
    case ProfileKind::parabola:
      return ProfileCurve::parabola(p.focal_length, p.vertex_offset, cfg.u_min,
                                    cfg.u_max);
    case ProfileKind::polynomial:
      return ProfileCurve::polynomial(p.coeffs, cfg.u_min, cfg.u_max);
  }
  throw ConfigError("unreachable profile kind");
}

}  // namespace catoptrica::cli
