#include "pag/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pag/catalog.hpp"
#include "pag/closedform.hpp"
#include "pag/coframing.hpp"
#include "pag/config.hpp"
#include "pag/io.hpp"
#include "pag/verify.hpp"

namespace pag {

namespace {

std::string_view domain_text(CaseTag tag)
{
  switch (tag) {
    case CaseTag::C11: return "all x";
    case CaseTag::C12: return "x2 != 0";
    case CaseTag::C211: return "all x";
    case CaseTag::C212: return "x3 != 0";
    case CaseTag::C22: return "x2 != 0";
    case CaseTag::C231: return "all x";
    case CaseTag::C232: return "cos(c3 x1) != 0, c3 x3^2 + c4 > 0";
    case CaseTag::C233: return "c3 x3^2 - c4 > 0";
  }
  return "";
}

std::string joined(const std::vector<std::string> & parts, const char * sep)
{
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::string vec_text(const Vec & v)
{
  std::vector<std::string> parts;
  for (Eigen::Index i = 0; i < v.size(); ++i) parts.push_back(format_double(v[i]));
  return joined(parts, " ");
}

std::string short_num(double v)
{
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

std::vector<std::string> integral_names(const ModelSpec & spec)
{
  std::vector<std::string> names;
  for (const auto & e : first_integrals(spec, default_phase_point(spec)).entries) names.push_back(e.name);
  return names;
}

int cmd_list_models(const std::string & case_name, std::ostream & out, std::ostream & err)
{
  std::vector<CaseTag> tags(std::begin(kAllCases), std::end(kAllCases));
  if (!case_name.empty()) {
    const auto tag = parse_case(case_name);
    if (!tag) {
      err << "unknown case '" << case_name << "'\n";
      return exit_usage;
    }
    tags = {*tag};
  }
  out << std::left << std::setw(6) << "case" << std::setw(5) << "dim" << std::setw(36) << "parameters"
      << std::setw(36) << "domain"
      << "integrals\n";
  for (CaseTag tag : tags) {
    std::vector<std::string> params;
    for (auto p : parameter_names(tag)) params.emplace_back(p);
    out << std::left << std::setw(6) << to_string(tag) << std::setw(5) << case_dim(tag) << std::setw(36)
        << joined(params, ",") << std::setw(36) << domain_text(tag) << joined(integral_names(default_spec(tag)), ",")
        << '\n';
  }
  return exit_ok;
}

// Writes to the configured file, or to `fallback` when no path is set.
template <class Writer>
void emit(const OutputConfig & output, std::ostream & fallback, Writer && write)
{
  if (output.path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(output.path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + output.path + "'");
  write(file);
  if (!file) throw ConfigError("write to '" + output.path + "' failed");
}

void apply_output_flags(OutputConfig & output, const std::string & out_path, const std::string & format,
                        std::optional<int> stride)
{
  if (!out_path.empty()) output.path = out_path;
  if (!format.empty()) {
    const auto f = parse_output_format(format);
    if (!f) throw ConfigError("--format must be csv or json");
    output.format = *f;
  }
  if (stride) {
    if (*stride < 1) throw ConfigError("--stride must be at least 1");
    output.stride = *stride;
  }
}

int cmd_validate(const std::string & config_path, const std::string & case_name, std::ostream & out,
                 std::ostream & err)
{
  if (config_path.empty() == case_name.empty()) {
    err << "validate: pass exactly one of --config or --case\n";
    return exit_usage;
  }
  if (!case_name.empty()) {
    const auto tag = parse_case(case_name);
    if (!tag) {
      err << "unknown case '" << case_name << "'\n";
      return exit_usage;
    }
    out << "valid: " << to_string(*tag) << " with default constants\n";
    return exit_ok;
  }
  const auto cfg = load_run_config(config_path);
  out << "valid: " << to_string(cfg.model.tag);
  if (cfg.initial) out << ", initial point in domain";
  if (cfg.family) out << ", closed-form family";
  out << '\n';
  return exit_ok;
}

int cmd_integrate(const RunConfig & cfg, std::ostream & out, std::ostream & err)
{
  if (!cfg.initial) throw ConfigError("integrate needs an initial phase point");
  const auto traj = integrate(cfg.model, *cfg.initial, cfg.t0, cfg.t1, cfg.integrator);
  emit(cfg.output, out, [&](std::ostream & os) {
    if (cfg.output.format == OutputFormat::csv) {
      write_trajectory_csv(os, cfg.model, traj, cfg.output.stride);
    } else {
      write_trajectory_json(os, cfg.model, traj, cfg.output.stride);
    }
  });
  std::ostream & report = cfg.output.path.empty() ? err : out;
  double worst = 0.0;
  for (const auto & d : integral_drift(cfg.model, traj)) worst = std::max(worst, d.drift);
  report << "case " << to_string(cfg.model.tag) << '\n';
  report << "stop_reason " << to_string(traj.stop_reason) << '\n';
  report << "nodes " << traj.size() << '\n';
  report << "t_final " << format_double(traj.times.back()) << '\n';
  report << "x_final " << vec_text(traj.states.back()) << '\n';
  report << "p_final " << vec_text(traj.costates.back()) << '\n';
  report << "max_integral_drift " << short_num(worst) << '\n';
  report << "energy " << (traj.size() >= 3 ? format_double(energy(cfg.model, traj)) : std::string("n/a")) << '\n';
  return traj.stop_reason == StopReason::horizon ? exit_ok : exit_early_stop;
}

int cmd_closed_form(const RunConfig & cfg, std::ostream & out, std::ostream & err)
{
  if (!cfg.family) throw ConfigError("closed-form needs a family");
  if (!cfg.grid) throw ConfigError("closed-form needs a grid");
  const auto times = grid_times(*cfg.grid);
  if (const auto pole = first_pole(cfg.model, *cfg.family, cfg.grid->t0, cfg.grid->t1)) {
    err << "pole inside grid at t = " << format_double(*pole) << '\n';
    return exit_early_stop;
  }
  std::vector<StateVec> states;
  for (double t : times) {
    try {
      states.push_back(evaluate(cfg.model, *cfg.family, t));
    } catch (const DomainError &) {
      err << "pole inside grid at t = " << format_double(t) << '\n';
      return exit_early_stop;
    }
  }
  emit(cfg.output, out, [&](std::ostream & os) {
    if (cfg.output.format == OutputFormat::csv) {
      write_samples_csv(os, cfg.model.dim(), times, states);
    } else {
      write_samples_json(os, cfg.model, times, states);
    }
  });
  if (!cfg.output.path.empty()) out << "rows " << times.size() << '\n';
  return exit_ok;
}

class Report
{
public:
  explicit Report(std::ostream & out) : out_(out) {}

  void below(const std::string & name, double value, double tol)
  {
    const bool ok = std::isfinite(value) && value < tol;
    failed_ = failed_ || !ok;
    out_ << (ok ? "PASS " : "FAIL ") << name << ' ' << short_num(value) << " < " << short_num(tol) << '\n';
  }

  void above(const std::string & name, double value, double bound)
  {
    const bool ok = std::isfinite(value) && value > bound;
    failed_ = failed_ || !ok;
    out_ << (ok ? "PASS " : "FAIL ") << name << ' ' << short_num(value) << " > " << short_num(bound) << '\n';
  }

  void error(const std::string & name, const std::string & what)
  {
    failed_ = true;
    out_ << "FAIL " << name << " error: " << what << '\n';
  }

  void skip(const std::string & name, const std::string & why) { out_ << "SKIP " << name << ' ' << why << '\n'; }

  bool failed() const { return failed_; }

private:
  std::ostream & out_;
  bool failed_ = false;
};

template <class Fn>
void guarded(Report & report, const std::string & name, Fn && fn)
{
  try {
    fn();
  } catch (const std::exception & e) {
    report.error(name, e.what());
  }
}

void suite_duality(const ModelSpec & spec, Report & report)
{
  guarded(report, "duality", [&] {
    Rng rng(seed_from_env());
    double worst = 0.0;
    for (const auto & x : sample_points(spec, 20, rng)) worst = std::max(worst, duality_error(spec, x));
    report.below("duality.max_error", worst, 1e-10);
  });
}

void suite_homogeneity(const ModelSpec & spec, Report & report)
{
  guarded(report, "homogeneity", [&] {
    Rng rng(seed_from_env());
    const auto result = homogeneity_check(spec, sample_points(spec, 10, rng));
    report.below("homogeneity.spread", result.max_spread, 1e-5);
  });
}

void suite_integrals(const ModelSpec & spec, Report & report)
{
  guarded(report, "integrals.gradient", [&] {
    Rng rng(seed_from_env());
    double worst = 0.0;
    for (const auto & pt : sample_phase_points(spec, 50, rng)) {
      const auto a = hamilton_rhs(spec, pt);
      const auto b = hamilton_rhs_fd(spec, pt);
      worst = std::max({worst, (a.xdot - b.xdot).lpNorm<Eigen::Infinity>(), (a.pdot - b.pdot).lpNorm<Eigen::Infinity>()});
    }
    report.below("integrals.gradient", worst, 1e-6);
  });
  guarded(report, "integrals.drift", [&] {
    const auto traj = integrate(spec, default_phase_point(spec), 0.0, 5.0);
    if (traj.stop_reason != StopReason::horizon) {
      report.error("integrals.drift", "flow stopped early: " + std::string(to_string(traj.stop_reason)));
      return;
    }
    for (const auto & d : integral_drift(spec, traj)) report.below("integrals.drift." + d.name, d.drift, 1e-8);
  });
}

void suite_appendix(const ModelSpec & spec, Report & report)
{
  if (spec.tag != CaseTag::C231 && spec.tag != CaseTag::C232 && spec.tag != CaseTag::C233) {
    report.skip("appendix", "only for C231, C232, C233");
    return;
  }
  guarded(report, "appendix.h_pde", [&] {
    Rng rng(seed_from_env());
    const double target = -2.0 * a9_expected_c2(spec);
    double lo = INFINITY, hi = -INFINITY, worst = 0.0;
    for (const auto & x : sample_points(spec, 10, rng)) {
      const double v = a9_lhs(spec, x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      worst = std::max(worst, std::abs(v - target));
    }
    report.below("appendix.h_pde.spread", hi - lo, 1e-5);
    report.below("appendix.h_pde.residual", worst, 1e-5);
  });
  guarded(report, "appendix.schwarzian", [&] {
    Rng rng(seed_from_env());
    const double c3 = spec.params.c3;
    const double expected = spec.tag == CaseTag::C231 ? 0.0 : (spec.tag == CaseTag::C232 ? -c3 * c3 : c3 * c3);
    double worst = 0.0;
    for (const auto & x : sample_points(spec, 10, rng)) worst = std::max(worst, std::abs(schwarzian_x1(spec, x) - expected));
    report.below("appendix.schwarzian", worst, spec.tag == CaseTag::C231 ? 1e-6 : 1e-4);
  });
  if (spec.tag == CaseTag::C231) {
    const auto r = characteristic_roots_case231(spec);
    const double eps = spec.params.epsilon;
    const double c = spec.params.c2;
    const auto q = [&](std::complex<double> z) { return std::abs(z * z - eps * c * z - eps); };
    report.below("appendix.char_roots", std::max(q(r.r1), q(r.r2)), 1e-12);
  }
}

void suite_symmetry(const ModelSpec & spec, Report & report)
{
  if (!has_symmetry_group(spec.tag)) {
    report.skip("symmetry", "no residual group for " + std::string(to_string(spec.tag)));
    return;
  }
  guarded(report, "symmetry", [&] {
    Rng rng(seed_from_env());
    const auto points = sample_points(spec, 10, rng);
    IsometryResidual worst;
    for (int e = 0; e < 5; ++e) {
      const auto sym = random_symmetry(spec, rng);
      for (const auto & x : points) {
        const auto r = isometry_residual(spec, sym, x);
        worst.drift_err = std::max(worst.drift_err, r.drift_err);
        worst.span_err = std::max(worst.span_err, r.span_err);
        worst.metric_err = std::max(worst.metric_err, r.metric_err);
      }
    }
    report.below("symmetry.drift_err", worst.drift_err, 1e-6);
    report.below("symmetry.span_err", worst.span_err, 1e-6);
    report.below("symmetry.metric_err", worst.metric_err, 1e-6);
  });
}

int cmd_check(const ModelSpec & spec, const std::string & suite, std::ostream & out, std::ostream & err)
{
  static const std::vector<std::string> suites{"homogeneity", "duality", "integrals", "appendix", "symmetry", "all"};
  if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
    err << "unknown suite '" << suite << "'\n";
    return exit_usage;
  }
  Report report(out);
  out << "case " << to_string(spec.tag) << '\n';
  const bool all = suite == "all";
  if (all || suite == "duality") suite_duality(spec, report);
  if (all || suite == "homogeneity") suite_homogeneity(spec, report);
  if (all || suite == "integrals") suite_integrals(spec, report);
  if (all || suite == "appendix") suite_appendix(spec, report);
  if (all || suite == "symmetry") suite_symmetry(spec, report);
  return report.failed() ? exit_check_failed : exit_ok;
}

int cmd_compare(const RunConfig & cfg, double tolerance, int samples, std::ostream & out, std::ostream & err)
{
  if (cfg.model.tag != CaseTag::C11 && cfg.model.tag != CaseTag::C12) {
    err << "no closed form for " << to_string(cfg.model.tag) << '\n';
    return exit_usage;
  }
  if (!cfg.initial) throw ConfigError("compare needs an initial phase point");
  if (samples < 2) throw ConfigError("--samples must be at least 2");
  ClosedFormFamily family;
  try {
    family = family_from_phase_point(cfg.model, *cfg.initial);
  } catch (const InvalidArgument & e) {
    err << "no closed form through this phase point: " << e.what() << '\n';
    return exit_usage;
  }
  const double span = cfg.t1 - cfg.t0;
  if (const auto pole = first_pole(cfg.model, family, 0.0, span)) {
    err << "closed form has a pole at t = " << format_double(cfg.t0 + *pole) << '\n';
    return exit_early_stop;
  }
  std::vector<double> times;
  for (int i = 0; i < samples; ++i) times.push_back(cfg.t0 + span * i / (samples - 1));
  times.back() = cfg.t1;
  const auto flow = integrate_to(cfg.model, *cfg.initial, times, cfg.integrator);
  if (flow.stop_reason != StopReason::horizon) {
    err << "integration stopped early: " << to_string(flow.stop_reason) << '\n';
    return exit_early_stop;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const StateVec ref = evaluate(cfg.model, family, times[i] - cfg.t0);
    worst = std::max(worst, (flow.states[i] - ref).lpNorm<Eigen::Infinity>());
  }
  out << "case " << to_string(cfg.model.tag) << '\n';
  out << "family " << std::visit([](const auto & f) -> std::string {
    using F = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<F, Case12Family>) {
      return std::string(to_string(f.subcase));
    } else {
      return "case11";
    }
  }, family) << '\n';
  out << "max_discrepancy " << short_num(worst) << '\n';
  out << (worst < tolerance ? "PASS" : "FAIL") << " tolerance " << short_num(tolerance) << '\n';
  return worst < tolerance ? exit_ok : exit_check_failed;
}

ModelSpec spec_from(const std::string & config_path, const std::string & case_name)
{
  if (!config_path.empty()) return load_run_config(config_path).model;
  const auto tag = parse_case(case_name);
  if (!tag) throw ConfigError("unknown case '" + case_name + "'");
  return default_spec(*tag);
}

}  // namespace

int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Homogeneous point-affine control systems with quadratic cost", "pag"};
  app.require_subcommand(1);

  std::string case_name, config_path, out_path, format, suite = "all";
  std::optional<int> stride;
  int samples = 101;
  double tolerance = 1e-6;

  auto * list = app.add_subcommand("list-models", "List the model catalog");
  list->add_option("--case", case_name, "Show one case in detail");

  auto * validate_cmd = app.add_subcommand("validate", "Validate a run configuration or a case name");
  validate_cmd->add_option("--config", config_path, "JSON run configuration");
  validate_cmd->add_option("--case", case_name, "Case tag");

  auto * integrate_cmd = app.add_subcommand("integrate", "Integrate Hamilton's equations");
  integrate_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  integrate_cmd->add_option("--out", out_path, "Output path (default: standard output)");
  integrate_cmd->add_option("--format", format, "csv or json");
  integrate_cmd->add_option("--stride", stride, "Write every n-th node");

  auto * closed = app.add_subcommand("closed-form", "Sample a closed-form family on a grid");
  closed->add_option("--config", config_path, "JSON run configuration with family and grid")->required();
  closed->add_option("--out", out_path, "Output path (default: standard output)");
  closed->add_option("--format", format, "csv or json");

  auto * check = app.add_subcommand("check", "Run verification suites");
  check->add_option("--case", case_name, "Case tag (default constants)");
  check->add_option("--config", config_path, "JSON run configuration supplying the model");
  check->add_option("--suite", suite, "homogeneity, duality, integrals, appendix, symmetry or all");

  auto * compare = app.add_subcommand("compare", "Compare numeric and closed-form trajectories");
  compare->add_option("--config", config_path, "JSON run configuration")->required();
  compare->add_option("--tolerance", tolerance, "Pass threshold on the max state discrepancy");
  compare->add_option("--samples", samples, "Number of comparison times");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (list->parsed()) return cmd_list_models(case_name, out, err);
    if (validate_cmd->parsed()) return cmd_validate(config_path, case_name, out, err);
    if (integrate_cmd->parsed()) {
      auto cfg = load_run_config(config_path);
      apply_output_flags(cfg.output, out_path, format, stride);
      return cmd_integrate(cfg, out, err);
    }
    if (closed->parsed()) {
      auto cfg = load_run_config(config_path);
      apply_output_flags(cfg.output, out_path, format, std::nullopt);
      return cmd_closed_form(cfg, out, err);
    }
    if (check->parsed()) {
      if (config_path.empty() == case_name.empty()) {
        err << "check: pass exactly one of --config or --case\n";
        return exit_usage;
      }
      return cmd_check(spec_from(config_path, case_name), suite, out, err);
    }
    if (compare->parsed()) return cmd_compare(load_run_config(config_path), tolerance, samples, out, err);
  } catch (const InvalidArgument & e) {
    err << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError & e) {
    err << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace pag
