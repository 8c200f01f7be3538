#include "pag/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

namespace pag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ingredients of the 2.3 family: W = (x3, 1, H), v1 = d/dx1 + J W, v2 = eps W.
struct Case23Terms
{
  double H = 0.0;
  Vec grad_H = Vec::Zero(3);
  double H1 = 0.0;              // dH/dx1
  Vec grad_H1 = Vec::Zero(3);   // gradient of dH/dx1
  double J = 0.0;
  Vec grad_J = Vec::Zero(3);
};

Case23Terms case23_terms(const ModelSpec & spec, const StateVec & x)
{
  const auto & p = spec.params;
  const double eps = p.epsilon;
  Case23Terms t;
  switch (spec.tag) {
    case CaseTag::C231: {
      t.H = eps * (x[0] + p.c2 * x[2]);
      t.grad_H << eps, 0.0, eps * p.c2;
      t.H1 = eps;
      t.J = p.c1;
      break;
    }
    case CaseTag::C232: {
      const double c3 = p.c3;
      const double q = c3 * x[2] * x[2] + p.c4;
      const double sq = std::sqrt(q);
      const double cs = std::cos(c3 * x[0]);
      const double sn = std::sin(c3 * x[0]);
      const double tn = sn / cs;
      const double sec2 = 1.0 / (cs * cs);
      const double F = f20_value(spec.f20, x[1]);
      const double dF = f20_derivative(spec.f20, x[1]);
      t.H = q * tn + F * sq;
      t.H1 = c3 * q * sec2;
      t.grad_H << t.H1, dF * sq, 2.0 * c3 * x[2] * tn + F * c3 * x[2] / sq;
      t.grad_H1 << 2.0 * c3 * c3 * q * sec2 * tn, 0.0, 2.0 * c3 * c3 * x[2] * sec2;
      const double R = eps * c3 * q;
      const double rs = std::sqrt(R);
      t.J = p.c1 * cs / rs;
      t.grad_J << -p.c1 * c3 * sn / rs, 0.0, -p.c1 * cs * eps * c3 * c3 * x[2] / (R * rs);
      break;
    }
    case CaseTag::C233: {
      const double c3 = p.c3;
      const double m = c3 * x[2] * x[2] - p.c4;
      const double sm = std::sqrt(m);
      const double th = std::tanh(c3 * x[0]);
      const double ch = std::cosh(c3 * x[0]);
      const double sh = std::sinh(c3 * x[0]);
      const double sech2 = 1.0 / (ch * ch);
      const double F = f20_value(spec.f20, x[1]);
      const double dF = f20_derivative(spec.f20, x[1]);
      t.H = -m * th + F * sm;
      t.H1 = -c3 * m * sech2;
      t.grad_H << t.H1, dF * sm, -2.0 * c3 * x[2] * th + F * c3 * x[2] / sm;
      t.grad_H1 << 2.0 * c3 * c3 * m * sech2 * th, 0.0, -2.0 * c3 * c3 * x[2] * sech2;
      // J = c1 / sqrt(eps H_x1); the radicand is eps c3 (c4 - c3 x3^2) > 0.
      const double R = -eps * c3 * m;
      const double rs = std::sqrt(R);
      t.J = p.c1 * ch / rs;
      t.grad_J << p.c1 * c3 * sh / rs, 0.0, p.c1 * ch * eps * c3 * c3 * x[2] / (R * rs);
      break;
    }
    default: throw InvalidArgument("case23_terms: not a 2.3 case");
  }
  return t;
}

bool is_case23(CaseTag tag)
{
  return tag == CaseTag::C231 || tag == CaseTag::C232 || tag == CaseTag::C233;
}

bool all_finite(const StateVec & x)
{
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(CaseTag tag)
{
  switch (tag) {
    case CaseTag::C11: return "C11";
    case CaseTag::C12: return "C12";
    case CaseTag::C211: return "C211";
    case CaseTag::C212: return "C212";
    case CaseTag::C22: return "C22";
    case CaseTag::C231: return "C231";
    case CaseTag::C232: return "C232";
    case CaseTag::C233: return "C233";
  }
  return "?";
}

std::optional<CaseTag> parse_case(std::string_view name)
{
  for (CaseTag tag : kAllCases) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

int case_dim(CaseTag tag)
{
  return (tag == CaseTag::C11 || tag == CaseTag::C12) ? 2 : 3;
}

std::vector<std::string_view> parameter_names(CaseTag tag)
{
  switch (tag) {
    case CaseTag::C11: return {"c1"};
    case CaseTag::C12: return {"j0", "g0"};
    case CaseTag::C211: return {"c2", "c3"};
    case CaseTag::C212: return {"c1", "c3"};
    case CaseTag::C22: return {"c1", "g0"};
    case CaseTag::C231: return {"c1", "c2", "epsilon", "g0"};
    case CaseTag::C232:
    case CaseTag::C233: return {"c1", "c3", "c4", "epsilon", "g0", "f20"};
  }
  return {};
}

std::vector<std::string> validate(const ModelSpec & spec)
{
  std::vector<std::string> errors;
  const auto & p = spec.params;
  const auto tag = spec.tag;

  const std::pair<const char *, double> named[] = {
    {"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}, {"c4", p.c4},
    {"j0", p.j0}, {"g0", p.g0}, {"epsilon", p.epsilon}};
  for (const auto & [name, value] : named) {
    if (!std::isfinite(value)) errors.push_back(std::string(name) + " must be finite");
  }
  for (double c : spec.f20) {
    if (!std::isfinite(c)) {
      errors.emplace_back("f20 coefficients must be finite");
      break;
    }
  }

  const bool uses_g0 = tag == CaseTag::C12 || tag == CaseTag::C22 || is_case23(tag);
  if (uses_g0 && !(p.g0 > 0.0)) errors.emplace_back("g0 must be positive");
  if (tag == CaseTag::C212 && p.c1 == 0.0) errors.emplace_back("c1 must be nonzero");
  if (is_case23(tag) && p.epsilon != 1.0 && p.epsilon != -1.0) {
    errors.emplace_back("epsilon must be -1 or +1");
  }
  if (tag == CaseTag::C232 || tag == CaseTag::C233) {
    if (p.c3 == 0.0) {
      errors.emplace_back("c3 must be nonzero");
    } else if (tag == CaseTag::C232 && !(p.epsilon * p.c3 > 0.0)) {
      errors.emplace_back("epsilon must equal sign(c3) for C232");
    } else if (tag == CaseTag::C233 && !(p.epsilon * p.c3 < 0.0)) {
      errors.emplace_back("epsilon must equal -sign(c3) for C233");
    }
  }
  return errors;
}

double f20_value(const std::vector<double> & coeffs, double x2)
{
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x2 + *it;
  return acc;
}

double f20_derivative(const std::vector<double> & coeffs, double x2)
{
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x2 + static_cast<double>(k) * coeffs[k];
  return acc;
}

double singular_margin(const ModelSpec & spec, const StateVec & x)
{
  const auto & p = spec.params;
  switch (spec.tag) {
    case CaseTag::C12:
    case CaseTag::C22: return std::abs(x[1]);
    case CaseTag::C212: return std::abs(x[2]);
    case CaseTag::C232: {
      const double q = p.c3 * x[2] * x[2] + p.c4;
      return std::min(std::abs(std::cos(p.c3 * x[0])), q);
    }
    case CaseTag::C233: return p.c3 * x[2] * x[2] - p.c4;
    default: return kInf;
  }
}

long long domain_component(const ModelSpec & spec, const StateVec & x)
{
  switch (spec.tag) {
    case CaseTag::C12:
    case CaseTag::C22: return x[1] > 0.0 ? 1 : -1;
    case CaseTag::C212: return x[2] > 0.0 ? 1 : -1;
    case CaseTag::C232: return static_cast<long long>(std::floor(spec.params.c3 * x[0] / std::numbers::pi + 0.5));
    default: return 0;
  }
}

bool in_domain(const ModelSpec & spec, const StateVec & x)
{
  if (x.size() != spec.dim() || !all_finite(x)) return false;
  const auto & p = spec.params;
  switch (spec.tag) {
    case CaseTag::C11: {
      const double G = std::exp(2.0 * p.c1 * x[0]);
      return std::isfinite(G) && G > 0.0;
    }
    case CaseTag::C12:
    case CaseTag::C22: return x[1] != 0.0 && p.g0 > 0.0;
    case CaseTag::C211: return true;
    case CaseTag::C212: return p.c1 != 0.0 && x[2] != 0.0;
    case CaseTag::C231: return p.g0 > 0.0;
    case CaseTag::C232: {
      const double q = p.c3 * x[2] * x[2] + p.c4;
      // A cosine below the rounding resolution of its argument counts as the pole itself.
      const double arg = p.c3 * x[0];
      const double resolution = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(arg));
      return p.g0 > 0.0 && std::abs(std::cos(arg)) > resolution && q > 0.0 && p.epsilon * p.c3 * q > 0.0;
    }
    case CaseTag::C233: {
      const double m = p.c3 * x[2] * x[2] - p.c4;
      return p.g0 > 0.0 && m > 0.0 && -p.epsilon * p.c3 * m > 0.0;
    }
  }
  return false;
}

void require_domain(const ModelSpec & spec, const StateVec & x, std::string_view where)
{
  if (!in_domain(spec, x)) {
    throw DomainError(std::string(where) + ": point outside the domain of " + std::string(to_string(spec.tag)));
  }
}

StateVec drift(const ModelSpec & spec, const StateVec & x)
{
  require_domain(spec, x, "drift");
  const auto & p = spec.params;
  switch (spec.tag) {
    case CaseTag::C11: return make_vec({1.0, 0.0});
    case CaseTag::C12: return make_vec({x[1], p.j0 * x[1]});
    case CaseTag::C211: return make_vec({1.0, x[2], p.c2 * x[1] + p.c3 * x[2]});
    case CaseTag::C212: return make_vec({1.0, x[2], p.c3 * x[2]});
    case CaseTag::C22: {
      const double r = x[2] / x[1];
      return make_vec({x[1], x[2], (1.5 * r * r + p.c1) * x[1]});
    }
    default: {
      const auto t = case23_terms(spec, x);
      return make_vec({1.0 + t.J * x[2], t.J, t.J * t.H});
    }
  }
}

StateVec control_field(const ModelSpec & spec, const StateVec & x)
{
  require_domain(spec, x, "control_field");
  switch (spec.tag) {
    case CaseTag::C11: return make_vec({0.0, 1.0});
    case CaseTag::C12: return make_vec({0.0, x[1]});
    case CaseTag::C211:
    case CaseTag::C212: return make_vec({0.0, 0.0, 1.0});
    case CaseTag::C22: return make_vec({0.0, 0.0, x[1]});
    default: {
      const double eps = spec.params.epsilon;
      return make_vec({eps * x[2], eps, eps * case23_H(spec, x)});
    }
  }
}

double metric_G(const ModelSpec & spec, const StateVec & x)
{
  require_domain(spec, x, "metric_G");
  const auto & p = spec.params;
  switch (spec.tag) {
    case CaseTag::C11: return std::exp(2.0 * p.c1 * x[0]);
    case CaseTag::C211: return 1.0;
    case CaseTag::C212: {
      const double s = p.c1 * x[2];
      return 1.0 / (s * s);
    }
    default: return p.g0;
  }
}

double cost_Q(const ModelSpec & spec, const StateVec & x, double u)
{
  return 0.5 * metric_G(spec, x) * u * u;
}

double case23_H(const ModelSpec & spec, const StateVec & x)
{
  if (!is_case23(spec.tag)) throw InvalidArgument("case23_H: case has no H function");
  return case23_terms(spec, x).H;
}

Case23Values case23_values(const ModelSpec & spec, const StateVec & x)
{
  if (!is_case23(spec.tag)) throw InvalidArgument("case23_values: case is not in the 2.3 family");
  require_domain(spec, x, "case23_values");
  const auto t = case23_terms(spec, x);
  return {t.H, t.H1, t.J};
}

FieldJacobians jacobians(const ModelSpec & spec, const StateVec & x)
{
  require_domain(spec, x, "jacobians");
  const auto & p = spec.params;
  const int n = spec.dim();
  FieldJacobians jac{Mat::Zero(n, n), Mat::Zero(n, n), Vec::Zero(n)};
  switch (spec.tag) {
    case CaseTag::C11:
      jac.grad_G[0] = 2.0 * p.c1 * std::exp(2.0 * p.c1 * x[0]);
      break;
    case CaseTag::C12:
      jac.drift(0, 1) = 1.0;
      jac.drift(1, 1) = p.j0;
      jac.control(1, 1) = 1.0;
      break;
    case CaseTag::C211:
      jac.drift(1, 2) = 1.0;
      jac.drift(2, 1) = p.c2;
      jac.drift(2, 2) = p.c3;
      break;
    case CaseTag::C212: {
      jac.drift(1, 2) = 1.0;
      jac.drift(2, 2) = p.c3;
      const double s = p.c1 * x[2];
      jac.grad_G[2] = -2.0 * p.c1 / (s * s * s);
      break;
    }
    case CaseTag::C22: {
      const double r = x[2] / x[1];
      jac.drift(0, 1) = 1.0;
      jac.drift(1, 2) = 1.0;
      jac.drift(2, 1) = p.c1 - 1.5 * r * r;
      jac.drift(2, 2) = 3.0 * r;
      jac.control(2, 1) = 1.0;
      break;
    }
    default: {
      const auto t = case23_terms(spec, x);
      Mat dW = Mat::Zero(3, 3);
      dW(0, 2) = 1.0;
      dW.row(2) = t.grad_H.transpose();
      const Vec W = make_vec({x[2], 1.0, t.H});
      jac.drift = t.J * dW + W * t.grad_J.transpose();
      jac.control = p.epsilon * dW;
      break;
    }
  }
  return jac;
}

StateVec frame_v3(const ModelSpec & spec, const StateVec & x)
{
  if (spec.dim() != 3) throw InvalidArgument("frame_v3: only defined for 3-state cases");
  const auto jac = jacobians(spec, x);
  const StateVec v1 = drift(spec, x);
  const StateVec v2 = control_field(spec, x);
  // [v1, v2] = Dv2 v1 - Dv1 v2
  return jac.drift * v2 - jac.control * v1;
}

ScaleField canonical_control_scale(const ModelSpec & spec, const StateVec & x)
{
  require_domain(spec, x, "canonical_control_scale");
  const auto & p = spec.params;
  const int n = spec.dim();
  ScaleField s{1.0, Vec::Zero(n)};
  switch (spec.tag) {
    case CaseTag::C11:
      s.value = std::exp(-p.c1 * x[0]);
      s.grad[0] = -p.c1 * s.value;
      break;
    case CaseTag::C212:
      s.value = p.c1 * x[2];
      s.grad[2] = p.c1;
      break;
    case CaseTag::C232:
    case CaseTag::C233: {
      const auto t = case23_terms(spec, x);
      const double a = p.epsilon * t.H1;
      s.value = 1.0 / std::sqrt(a);
      s.grad = -0.5 * p.epsilon * t.grad_H1 / (a * std::sqrt(a));
      break;
    }
    default: break;
  }
  return s;
}

}  // namespace pag
