#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pag/pmp.hpp"

namespace pag {

enum class Method { rk4_fixed, rk45_adaptive };
enum class StopReason { horizon, domain_exit, blow_up, step_failure };

std::string_view to_string(Method m);
std::string_view to_string(StopReason r);
std::optional<Method> parse_method(std::string_view name);
std::optional<StopReason> parse_stop_reason(std::string_view name);

struct IntegratorConfig
{
  Method method = Method::rk45_adaptive;
  /// Step of rk4_fixed; ignored by rk45_adaptive.
  double step = 1e-2;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  long long max_steps = 1'000'000;
  /// Stop when max(|x|, |p|) exceeds this.
  double blow_up_norm = 1e8;
  /// Stop when singular_margin drops below this.
  double domain_margin = 1e-6;
};

/// Throws InvalidArgument on non-positive steps/tolerances or max_steps < 1.
void validate_config(const IntegratorConfig & cfg);

struct Trajectory
{
  std::vector<double> times;
  std::vector<StateVec> states;
  std::vector<Covector> costates;
  std::vector<double> controls;
  std::vector<FirstIntegralSet> integral_log;
  StopReason stop_reason = StopReason::horizon;

  std::size_t size() const { return times.size(); }
};

/// Integrates Hamilton's equations from `start` over [t0, t1]. Early stops are reported in
/// stop_reason; every recorded node is in the domain and logs u* and the first integrals.
Trajectory integrate(const ModelSpec & spec, const PhasePoint & start, double t0, double t1,
                     const IntegratorConfig & cfg = {});

/// Integrates through every time in `times` (increasing, times[0] is the start time) and
/// returns the states there. Stops with the partial result on an early stop.
struct SampledFlow
{
  std::vector<double> times;
  std::vector<StateVec> states;
  StopReason stop_reason = StopReason::horizon;
};

SampledFlow integrate_to(const ModelSpec & spec, const PhasePoint & start, const std::vector<double> & times,
                         const IntegratorConfig & cfg = {});

/// Integral of Q(x, u*) dt over the recorded grid by composite Simpson on non-uniform nodes.
double energy(const ModelSpec & spec, const Trajectory & traj);

/// Composite Simpson for arbitrary increasing nodes (at least 3).
double simpson_nonuniform(const std::vector<double> & t, const std::vector<double> & f);

struct IntegralDrift
{
  std::string name;
  double drift = 0.0;
};

/// For each logged integral, max |I(t) - I(t0)| / max(1, |I(t0)|) (complex modulus).
std::vector<IntegralDrift> integral_drift(const ModelSpec & spec, const Trajectory & traj);

}  // namespace pag
