#include "pag/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pag {

namespace {

using PhaseVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;

PhaseVec pack(const StateVec & x, const Covector & p)
{
  PhaseVec y(x.size() + p.size());
  y << x, p;
  return y;
}

PhasePoint unpack(const PhaseVec & y, Eigen::Index n)
{
  return {y.head(n), y.tail(n)};
}

bool all_finite(const PhaseVec & y)
{
  return y.allFinite();
}

class Flow
{
public:
  Flow(const ModelSpec & spec, Eigen::Index n) : spec_(spec), n_(n) {}

  // Throws DomainError if y leaves the domain.
  PhaseVec operator()(const PhaseVec & y) const
  {
    if (!all_finite(y)) throw DomainError("integrate: non-finite stage");
    const auto v = hamilton_rhs(spec_, unpack(y, n_));
    return pack(v.xdot, v.pdot);
  }

private:
  const ModelSpec & spec_;
  Eigen::Index n_;
};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct DopriStep
{
  PhaseVec y;
  PhaseVec f_end;
  double err;
};

DopriStep dopri_step(const Flow & f, const PhaseVec & y, const PhaseVec & k1, double h, const IntegratorConfig & cfg)
{
  const PhaseVec k2 = f(y + h * (a21 * k1));
  const PhaseVec k3 = f(y + h * (a31 * k1 + a32 * k2));
  const PhaseVec k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const PhaseVec k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const PhaseVec k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const PhaseVec y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const PhaseVec k7 = f(y5);
  const PhaseVec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
    acc += (err[i] / sc) * (err[i] / sc);
  }
  return {y5, k7, std::sqrt(acc / static_cast<double>(y.size()))};
}

PhaseVec rk4_step(const Flow & f, const PhaseVec & y, double h)
{
  const PhaseVec k1 = f(y);
  const PhaseVec k2 = f(y + 0.5 * h * k1);
  const PhaseVec k3 = f(y + 0.5 * h * k2);
  const PhaseVec k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double scaled_norm(const PhaseVec & v, const PhaseVec & y, const IntegratorConfig & cfg)
{
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
    acc += (v[i] / sc) * (v[i] / sc);
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Starting step after Hairer, Norsett and Wanner (order 5).
double initial_step(const Flow & f, const PhaseVec & y, const PhaseVec & f0, double span, const IntegratorConfig & cfg)
{
  const double d0 = scaled_norm(y, y, cfg);
  const double d1 = scaled_norm(f0, y, cfg);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  double d2 = 0.0;
  try {
    d2 = scaled_norm(f(y + h0 * f0) - f0, y, cfg) / h0;
  } catch (const DomainError &) {
    return h0 * 1e-3;
  }
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

class Recorder
{
public:
  Recorder(const ModelSpec & spec, Trajectory & traj, Eigen::Index n) : spec_(spec), traj_(traj), n_(n) {}

  void record(double t, const PhaseVec & y)
  {
    const auto pt = unpack(y, n_);
    traj_.times.push_back(t);
    traj_.states.push_back(pt.x);
    traj_.costates.push_back(pt.p);
    traj_.controls.push_back(optimal_control(spec_, pt));
    traj_.integral_log.push_back(first_integrals(spec_, pt));
  }

private:
  const ModelSpec & spec_;
  Trajectory & traj_;
  Eigen::Index n_;
};

// Classifies a candidate node: nullopt means it may be recorded and the run continues.
std::optional<StopReason> node_status(const ModelSpec & spec, const PhaseVec & prev, const PhaseVec & y,
                                      Eigen::Index n, const IntegratorConfig & cfg)
{
  if (!all_finite(y)) return StopReason::blow_up;
  const StateVec x = y.head(n);
  if (!in_domain(spec, x) || singular_margin(spec, x) < cfg.domain_margin) return StopReason::domain_exit;
  // A step may jump over a locus where the fields stay bounded.
  if (domain_component(spec, x) != domain_component(spec, StateVec(prev.head(n)))) return StopReason::domain_exit;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Method m)
{
  return m == Method::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
}

std::string_view to_string(StopReason r)
{
  switch (r) {
    case StopReason::horizon: return "horizon";
    case StopReason::domain_exit: return "domain_exit";
    case StopReason::blow_up: return "blow_up";
    case StopReason::step_failure: return "step_failure";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name)
{
  if (name == "rk4_fixed") return Method::rk4_fixed;
  if (name == "rk45_adaptive") return Method::rk45_adaptive;
  return std::nullopt;
}

std::optional<StopReason> parse_stop_reason(std::string_view name)
{
  for (auto r : {StopReason::horizon, StopReason::domain_exit, StopReason::blow_up, StopReason::step_failure}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

void validate_config(const IntegratorConfig & cfg)
{
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (cfg.method == Method::rk4_fixed && !positive(cfg.step)) throw InvalidArgument("integrator: step must be positive");
  if (cfg.method == Method::rk45_adaptive && (!positive(cfg.abs_tol) || !positive(cfg.rel_tol))) {
    throw InvalidArgument("integrator: tolerances must be positive");
  }
  if (cfg.max_steps < 1) throw InvalidArgument("integrator: max_steps must be at least 1");
  if (!positive(cfg.blow_up_norm)) throw InvalidArgument("integrator: blow_up_norm must be positive");
  if (!(cfg.domain_margin >= 0.0) || !std::isfinite(cfg.domain_margin)) {
    throw InvalidArgument("integrator: domain_margin must be nonnegative");
  }
}

Trajectory integrate(const ModelSpec & spec, const PhasePoint & start, double t0, double t1,
                     const IntegratorConfig & cfg)
{
  validate_config(cfg);
  const auto errors = validate(spec);
  if (!errors.empty()) throw InvalidArgument("integrate: invalid model: " + errors.front());
  if (!(t0 < t1) || !std::isfinite(t0) || !std::isfinite(t1)) throw InvalidArgument("integrate: need t0 < t1");
  require_phase_point(spec, start, "integrate");

  const Eigen::Index n = spec.dim();
  const Flow f(spec, n);
  Trajectory traj;
  Recorder rec(spec, traj, n);
  PhaseVec y = pack(start.x, start.p);
  double t = t0;
  rec.record(t, y);
  if (y.norm() > cfg.blow_up_norm) {
    traj.stop_reason = StopReason::blow_up;
    return traj;
  }

  const double span = t1 - t0;
  long long accepted = 0;

  if (cfg.method == Method::rk4_fixed) {
    while (t < t1) {
      if (accepted >= cfg.max_steps) {
        traj.stop_reason = StopReason::step_failure;
        return traj;
      }
      const bool last = t + cfg.step >= t1;
      const double h = last ? t1 - t : cfg.step;
      PhaseVec next;
      try {
        next = rk4_step(f, y, h);
      } catch (const DomainError &) {
        traj.stop_reason = StopReason::domain_exit;
        return traj;
      }
      if (const auto stop = node_status(spec, y, next, n, cfg)) {
        traj.stop_reason = *stop;
        return traj;
      }
      // Index-based time avoids drift from repeated addition.
      t = last ? t1 : t0 + static_cast<double>(accepted + 1) * cfg.step;
      y = next;
      ++accepted;
      rec.record(t, y);
      if (y.norm() > cfg.blow_up_norm) {
        traj.stop_reason = StopReason::blow_up;
        return traj;
      }
    }
    traj.stop_reason = StopReason::horizon;
    return traj;
  }

  PhaseVec k1 = f(y);
  double h = initial_step(f, y, k1, span, cfg);
  while (t < t1) {
    if (accepted >= cfg.max_steps) {
      traj.stop_reason = StopReason::step_failure;
      return traj;
    }
    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), std::abs(span));
    if (h < hmin) {
      traj.stop_reason = StopReason::step_failure;
      return traj;
    }
    const bool last = t + h >= t1;
    if (last) h = t1 - t;

    DopriStep step;
    try {
      step = dopri_step(f, y, k1, h, cfg);
    } catch (const DomainError &) {
      h *= 0.5;
      if (h < hmin) {
        traj.stop_reason = StopReason::domain_exit;
        return traj;
      }
      continue;
    }
    if (!std::isfinite(step.err) || step.err > 1.0) {
      const double factor = std::isfinite(step.err) ? std::max(0.2, 0.9 * std::pow(step.err, -0.2)) : 0.2;
      h *= factor;
      continue;
    }
    if (const auto stop = node_status(spec, y, step.y, n, cfg)) {
      traj.stop_reason = *stop;
      return traj;
    }
    t = last ? t1 : t + h;
    y = step.y;
    k1 = step.f_end;
    ++accepted;
    rec.record(t, y);
    if (y.norm() > cfg.blow_up_norm) {
      traj.stop_reason = StopReason::blow_up;
      return traj;
    }
    const double factor = step.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 5.0);
    h *= factor;
  }
  traj.stop_reason = StopReason::horizon;
  return traj;
}

SampledFlow integrate_to(const ModelSpec & spec, const PhasePoint & start, const std::vector<double> & times,
                         const IntegratorConfig & cfg)
{
  if (times.empty()) throw InvalidArgument("integrate_to: no times");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("integrate_to: times must be strictly increasing");
  }
  require_phase_point(spec, start, "integrate_to");
  SampledFlow out;
  out.times.push_back(times.front());
  out.states.push_back(start.x);
  PhasePoint pt = start;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const auto seg = integrate(spec, pt, times[i - 1], times[i], cfg);
    if (seg.stop_reason != StopReason::horizon) {
      out.stop_reason = seg.stop_reason;
      return out;
    }
    pt = {seg.states.back(), seg.costates.back()};
    out.times.push_back(times[i]);
    out.states.push_back(pt.x);
  }
  return out;
}

double simpson_nonuniform(const std::vector<double> & t, const std::vector<double> & f)
{
  if (t.size() != f.size()) throw InvalidArgument("simpson: node and value counts differ");
  const std::size_t n = t.size();
  if (n < 3) throw InvalidArgument("simpson: at least 3 nodes are required");
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = t[i + 1] - t[i];
    const double h1 = t[i + 2] - t[i + 1];
    total += (h0 + h1) / 6.0 *
             ((2.0 - h1 / h0) * f[i] + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i + 1 < n) {
    // One interval left: integrate the parabola through the last three nodes over it.
    const double h0 = t[n - 2] - t[n - 3];
    const double h1 = t[n - 1] - t[n - 2];
    total += f[n - 1] * h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1)) + f[n - 2] * h1 * (h1 + 3.0 * h0) / (6.0 * h0) -
             f[n - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  }
  return total;
}

double energy(const ModelSpec & spec, const Trajectory & traj)
{
  if (traj.size() < 3) throw InvalidArgument("energy: at least 3 nodes are required");
  std::vector<double> q;
  q.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) q.push_back(cost_Q(spec, traj.states[i], traj.controls[i]));
  return simpson_nonuniform(traj.times, q);
}

std::vector<IntegralDrift> integral_drift(const ModelSpec & spec, const Trajectory & traj)
{
  if (traj.integral_log.empty()) throw InvalidArgument("integral_drift: empty integral log");
  const auto & first = traj.integral_log.front();
  if (traj.states.front().size() != spec.dim()) throw InvalidArgument("integral_drift: trajectory of another case");
  std::vector<IntegralDrift> out;
  for (std::size_t k = 0; k < first.size(); ++k) {
    const auto I0 = first[k].value;
    const double scale = std::max(1.0, std::abs(I0));
    double worst = 0.0;
    for (const auto & set : traj.integral_log) worst = std::max(worst, std::abs(set[k].value - I0) / scale);
    out.push_back({first[k].name, worst});
  }
  return out;
}

}  // namespace pag
