#include "pag/pmp.hpp"

#include <cmath>

namespace pag {

namespace {

bool f20_is_constant(const std::vector<double> & coeffs)
{
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    if (coeffs[k] != 0.0) return false;
  }
  return true;
}

FirstIntegral real_integral(std::string name, double value)
{
  return {std::move(name), {value, 0.0}, false};
}

}  // namespace

void require_phase_point(const ModelSpec & spec, const PhasePoint & pt, std::string_view where)
{
  if (pt.p.size() != spec.dim()) {
    throw InvalidArgument(std::string(where) + ": covector length does not match the case dimension");
  }
  for (Eigen::Index i = 0; i < pt.p.size(); ++i) {
    if (!std::isfinite(pt.p[i])) throw InvalidArgument(std::string(where) + ": non-finite covector");
  }
  require_domain(spec, pt.x, where);
}

double optimal_control(const ModelSpec & spec, const PhasePoint & pt)
{
  require_phase_point(spec, pt, "optimal_control");
  return pt.p.dot(control_field(spec, pt.x)) / metric_G(spec, pt.x);
}

double control_hamiltonian(const ModelSpec & spec, const PhasePoint & pt, double u)
{
  require_phase_point(spec, pt, "control_hamiltonian");
  const StateVec v = drift(spec, pt.x) + u * control_field(spec, pt.x);
  return pt.p.dot(v) - cost_Q(spec, pt.x, u);
}

double hamiltonian(const ModelSpec & spec, const PhasePoint & pt)
{
  require_phase_point(spec, pt, "hamiltonian");
  const double S = pt.p.dot(control_field(spec, pt.x));
  return pt.p.dot(drift(spec, pt.x)) + S * S / (2.0 * metric_G(spec, pt.x));
}

PhaseVelocity hamilton_rhs(const ModelSpec & spec, const PhasePoint & pt)
{
  require_phase_point(spec, pt, "hamilton_rhs");
  const StateVec v1 = drift(spec, pt.x);
  const StateVec v2 = control_field(spec, pt.x);
  const double G = metric_G(spec, pt.x);
  const auto jac = jacobians(spec, pt.x);

  const double S = pt.p.dot(v2);
  const double u = S / G;
  PhaseVelocity out;
  out.xdot = v1 + u * v2;
  // dH/dx = Dv1^T p + u Dv2^T p - u^2/2 grad G
  out.pdot = -(jac.drift.transpose() * pt.p + u * (jac.control.transpose() * pt.p) - 0.5 * u * u * jac.grad_G);
  return out;
}

PhaseVelocity hamilton_rhs_fd(const ModelSpec & spec, const PhasePoint & pt, double h)
{
  if (!(h > 0.0)) throw InvalidArgument("hamilton_rhs_fd: step must be positive");
  require_phase_point(spec, pt, "hamilton_rhs_fd");
  const int n = spec.dim();
  PhaseVelocity out{Vec::Zero(n), Vec::Zero(n)};
  for (int i = 0; i < n; ++i) {
    PhasePoint hi = pt;
    PhasePoint lo = pt;
    hi.p[i] += h;
    lo.p[i] -= h;
    out.xdot[i] = (hamiltonian(spec, hi) - hamiltonian(spec, lo)) / (2.0 * h);

    hi = pt;
    lo = pt;
    hi.x[i] += h;
    lo.x[i] -= h;
    if (!in_domain(spec, hi.x) || !in_domain(spec, lo.x)) {
      throw DomainError("hamilton_rhs_fd: stencil leaves the domain");
    }
    out.pdot[i] = -(hamiltonian(spec, hi) - hamiltonian(spec, lo)) / (2.0 * h);
  }
  return out;
}

CharRoots characteristic_roots(double epsilon, double c)
{
  const std::complex<double> disc = std::sqrt(std::complex<double>(c * c + 4.0 * epsilon, 0.0));
  return {(epsilon * c + disc) / 2.0, (epsilon * c - disc) / 2.0};
}

CharRoots characteristic_roots_case231(const ModelSpec & spec)
{
  if (spec.tag != CaseTag::C231) throw InvalidArgument("characteristic_roots_case231: case must be C231");
  return characteristic_roots(spec.params.epsilon, spec.params.c2);
}

FirstIntegralSet first_integrals(const ModelSpec & spec, const PhasePoint & pt)
{
  require_phase_point(spec, pt, "first_integrals");
  const auto & x = pt.x;
  const auto & p = pt.p;
  FirstIntegralSet set;
  set.entries.push_back(real_integral("H", hamiltonian(spec, pt)));
  switch (spec.tag) {
    case CaseTag::C11:
      set.entries.push_back(real_integral("I1", p[1]));
      break;
    case CaseTag::C12:
      // I1 is H itself.
      set.entries.push_back(real_integral("I2", p[0]));
      set.entries.push_back(real_integral("I3", p[0] * x[0] + p[1] * x[1]));
      break;
    case CaseTag::C211:
      set.entries.push_back(real_integral("I1", p[0]));
      break;
    case CaseTag::C212:
      set.entries.push_back(real_integral("I1", p[0]));
      set.entries.push_back(real_integral("I2", p[1]));
      break;
    case CaseTag::C22:
      set.entries.push_back(real_integral("I1", p[0]));
      set.entries.push_back(real_integral("I2", p[0] * x[0] + p[1] * x[1] + p[2] * x[2]));
      set.entries.push_back(real_integral(
        "I3", p[0] * x[0] * x[0] + 2.0 * p[1] * x[0] * x[1] + 2.0 * p[2] * x[0] * x[2] + 2.0 * p[2] * x[1] * x[1]));
      break;
    case CaseTag::C231: {
      const auto roots = characteristic_roots_case231(spec);
      const bool cplx = roots.r1.imag() != 0.0;
      const auto integral = [&](std::complex<double> r) {
        return (p[0] + r * p[2]) * std::exp(r * x[1]);
      };
      set.entries.push_back({"I1", integral(roots.r1), cplx});
      set.entries.push_back({"I2", integral(roots.r2), cplx});
      set.entries.push_back(real_integral("I3", p[1]));
      break;
    }
    case CaseTag::C232:
    case CaseTag::C233:
      // p2 is conserved only while H does not depend on x2.
      if (f20_is_constant(spec.f20)) set.entries.push_back(real_integral("I1", p[1]));
      break;
  }
  return set;
}

Covector reduce_momenta_case22(const StateVec & x, double k1, double k2, double k3)
{
  if (x.size() != 3) throw InvalidArgument("reduce_momenta_case22: state must have length 3");
  if (x[1] == 0.0) throw DomainError("reduce_momenta_case22: x2 must be nonzero");
  const double x1 = x[0];
  const double x2 = x[1];
  const double x3 = x[2];
  const double x2sq = x2 * x2;
  const double x2cu = x2sq * x2;
  Covector p(3);
  p[0] = k1;
  p[1] = k1 * (-x1 / x2 - x1 * x1 * x3 / (2.0 * x2cu)) + k2 * (1.0 / x2 + x1 * x3 / x2cu) + k3 * (-x3 / (2.0 * x2cu));
  p[2] = k1 * (x1 * x1 / (2.0 * x2sq)) + k2 * (-x1 / x2sq) + k3 * (1.0 / (2.0 * x2sq));
  return p;
}

}  // namespace pag
