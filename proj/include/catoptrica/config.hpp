#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "catoptrica/profile.hpp"
#include "catoptrica/types.hpp"

namespace catoptrica::cli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message)
      : std::runtime_error(message) {}
};

enum class ProfileKind { circle, ellipse, parabola, polynomial };

struct ProfileSpec {
  ProfileKind kind = ProfileKind::circle;
  Complex center{0.0, 0.0};        // circle
  double radius = 1.0;             // circle
  double a = 1.0, b = 1.0;         // ellipse semi-axes
  double focal_length = 1.0;       // parabola
  double vertex_offset = 0.0;      // parabola
  std::vector<Complex> coeffs;     // polynomial
};

enum class OutputFormat { csv, json };

// Validated run description. Parsing fills defaults for everything except the
// profile; unknown fields are rejected.
struct RunConfig {
  ProfileSpec profile;
  double u_min = 0.0, u_max = 1.0;
  int u_samples = 64;
  double v_min = -1.0, v_max = 1.0;
  int v_samples = 17;
  bool signs_all = false;
  std::string out;  // optional; the CLI flag overrides
  OutputFormat format = OutputFormat::csv;
};

// Parses a JSON config document. Throws ConfigError with the offending field
// (and line for syntax errors) in the message.
RunConfig parse_config(std::string_view text);

ProfileCurve make_profile(const RunConfig& cfg);

}  // namespace catoptrica::cli
