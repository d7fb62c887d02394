#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stiffchaos/ode_core.hpp"
#include "stiffchaos/transform.hpp"

namespace stiffchaos::cli {

/// Invalid configuration or flag. Exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs in one comparison do not share problem, grid or oracle.
class MismatchedBaseline : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class SolverKind { rk4, rk4_adaptive, trapezoid };

struct ExperimentConfig {
  std::string problem = "lorenz84";
  std::map<std::string, double> problem_params;
  std::optional<double> t_start;
  std::optional<double> t_end;

  SolverKind solver = SolverKind::rk4;
  std::size_t steps = 600;
  AdaptiveConfig adaptive;

  Method method = Method::cumulative_avg;
  /// 0 selects the per-method default N/K.
  std::size_t intervals = 0;
  std::optional<Vec3> mu_init;
  std::optional<Vec3> coeffs;
  std::optional<Vec3> eps_scale;
  std::optional<double> q;
  std::optional<GammaSource> gamma_source;

  /// Diagnostic accuracy; unset means the benchmark default.
  std::optional<double> eps;
  std::size_t samples = 400;
  std::size_t component = 0;
  std::optional<double> window_from;
  std::optional<double> window_to;
  double kappa_g = -1.0;

  std::size_t refinement = 1024;
  std::string out_dir = ".";
};

/// Default configuration document; every key can be overridden by a dotted
/// path such as `solver.steps`.
[[nodiscard]] nlohmann::json default_document();

/// Parses JSON text; syntax errors are reported with line and column.
[[nodiscard]] nlohmann::json parse_document(const std::string& text, const std::string& origin);

[[nodiscard]] nlohmann::json load_document(const std::string& path);

/// Recursively merges `overlay` into `base`; unknown keys are rejected with
/// the full dotted path.
void merge_document(nlohmann::json& base, const nlohmann::json& overlay,
                    const std::string& prefix = "");

/// Sets a dotted path from a string value, parsed as JSON when possible and
/// as a plain string otherwise. Comma-separated numbers become arrays.
void set_path(nlohmann::json& doc, const std::string& dotted, const std::string& value);

/// Validates and converts a merged document.
[[nodiscard]] ExperimentConfig to_config(const nlohmann::json& doc);

[[nodiscard]] std::string to_string(SolverKind k);

[[nodiscard]] Vec3 parse_vec3(const std::string& text, const std::string& field);

}  // namespace stiffchaos::cli
