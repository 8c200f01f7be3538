#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pag/closedform.hpp"
#include "pag/integrate.hpp"

namespace pag {

/// Malformed or inconsistent run configuration.
class ConfigError : public InvalidArgument
{
public:
  explicit ConfigError(const std::string & what) : InvalidArgument(what) {}
};

enum class OutputFormat { csv, json };

std::string_view to_string(OutputFormat f);
std::optional<OutputFormat> parse_output_format(std::string_view name);

struct OutputConfig
{
  /// Empty writes to standard output.
  std::string path;
  OutputFormat format = OutputFormat::csv;
  int stride = 1;
};

struct SampleGrid
{
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 0.1;
};

/// Uniform grid t0, t0 + step, ... up to t1 (inclusive when step divides the span).
std::vector<double> grid_times(const SampleGrid & grid);

/// One JSON document:
///   model      {"case": "C11", <case constants>, "f20": [...]}
///   initial    {"x": [...], "p": [...]}
///   family     closed-form constants for C11, C12, C211, C212
///   t_span     [t0, t1]
///   grid       {"t0", "t1", "step"}
///   integrator {"method", "step", "abs_tol", "rel_tol", "max_steps", "blow_up_norm", "domain_margin"}
///   output     {"path", "format", "stride"}
/// Only "model" is required. Unknown keys anywhere are rejected.
struct RunConfig
{
  ModelSpec model;
  std::optional<PhasePoint> initial;
  std::optional<ClosedFormFamily> family;
  double t0 = 0.0;
  double t1 = 1.0;
  std::optional<SampleGrid> grid;
  IntegratorConfig integrator;
  OutputConfig output;
};

/// Throws ConfigError on syntax errors, unknown keys, wrong types, invalid model constants,
/// out-of-domain initial points or violated family guards.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string & path);

}  // namespace pag
