#include "pag/verify.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "pag/pmp.hpp"

namespace pag {

namespace {

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite_all(std::initializer_list<double> values)
{
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_in_domain(const ModelSpec & spec, const StateVec & x, const char * what)
{
  if (!in_domain(spec, x)) throw DomainError(std::string("apply_symmetry: ") + what + " outside the domain");
}

std::vector<BasisTerm> quadratic_basis(std::complex<double> r1, std::complex<double> r2)
{
  return real_basis({r1, r2});
}

double value_at(const StateVec & x, const std::function<double(const StateVec &)> & f, int i, double dx)
{
  StateVec y = x;
  y[i] += dx;
  return f(y);
}

// Central first derivative along coordinate i.
double d1(const std::function<double(const StateVec &)> & f, const StateVec & x, int i, double h)
{
  return (value_at(x, f, i, h) - value_at(x, f, i, -h)) / (2.0 * h);
}

// Stencil points must stay on the same side of every singular locus as the center.
void require_stencil_point(const ModelSpec & spec, const StateVec & z, long long component)
{
  require_domain(spec, z, "stencil");
  if (domain_component(spec, z) != component) throw DomainError("stencil: crosses a singular locus");
}

double case23_H_checked(const ModelSpec & spec, const StateVec & z, long long component)
{
  require_stencil_point(spec, z, component);
  return case23_values(spec, z).H;
}

double case23_H1_checked(const ModelSpec & spec, const StateVec & z, long long component)
{
  require_stencil_point(spec, z, component);
  return case23_values(spec, z).H_x1;
}

void require_case23(const ModelSpec & spec, const char * where)
{
  if (spec.tag != CaseTag::C231 && spec.tag != CaseTag::C232 && spec.tag != CaseTag::C233) {
    throw InvalidArgument(std::string(where) + ": case must be C231, C232 or C233");
  }
}

}  // namespace

CaseTag symmetry_case(const SymmetryTransform & sym)
{
  return std::visit(Overloaded{
                      [](const Case11Symmetry &) { return CaseTag::C11; },
                      [](const Case12Symmetry &) { return CaseTag::C12; },
                      [](const Case211Symmetry &) { return CaseTag::C211; },
                      [](const Case212Symmetry &) { return CaseTag::C212; },
                      [](const Case22Symmetry &) { return CaseTag::C22; },
                      [](const Case231Symmetry &) { return CaseTag::C231; },
                    },
                    sym);
}

bool has_symmetry_group(CaseTag tag)
{
  return tag != CaseTag::C232 && tag != CaseTag::C233;
}

std::vector<BasisTerm> case211_symmetry_basis(double c2, double c3)
{
  const std::complex<double> disc = std::sqrt(std::complex<double>(c3 * c3 + 4.0 * c2, 0.0));
  return quadratic_basis((c3 + disc) / 2.0, (c3 - disc) / 2.0);
}

std::vector<BasisTerm> case231_symmetry_basis(double epsilon, double c2)
{
  const auto roots = characteristic_roots(epsilon, c2);
  return quadratic_basis(roots.r1, roots.r2);
}

void validate_symmetry(const ModelSpec & spec, const SymmetryTransform & sym)
{
  if (symmetry_case(sym) != spec.tag) {
    throw InvalidArgument("symmetry: transform of " + std::string(to_string(symmetry_case(sym))) + " used with " +
                          std::string(to_string(spec.tag)));
  }
  std::visit(Overloaded{
               [](const Case11Symmetry & s) {
                 if (!finite_all({s.a, s.b})) throw InvalidArgument("symmetry: non-finite parameter");
               },
               [](const Case12Symmetry & s) {
                 if (!finite_all({s.a, s.b})) throw InvalidArgument("symmetry: non-finite parameter");
                 if (s.a == 0.0) throw InvalidArgument("symmetry: C12 scaling a must be nonzero");
               },
               [](const Case211Symmetry & s) {
                 if (!finite_all({s.a, s.phi0[0], s.phi0[1]})) throw InvalidArgument("symmetry: non-finite parameter");
               },
               [](const Case212Symmetry & s) {
                 if (!finite_all({s.a, s.b, s.c})) throw InvalidArgument("symmetry: non-finite parameter");
                 if (s.b == 0.0) throw InvalidArgument("symmetry: C212 scaling b must be nonzero");
               },
               [](const Case22Symmetry & s) {
                 if (!finite_all({s.a, s.b, s.c, s.d})) throw InvalidArgument("symmetry: non-finite parameter");
                 if (s.a * s.d - s.b * s.c == 0.0) throw InvalidArgument("symmetry: LFT needs ad - bc != 0");
               },
               [](const Case231Symmetry & s) {
                 if (!finite_all({s.a, s.b1, s.b2})) throw InvalidArgument("symmetry: non-finite parameter");
               },
             },
             sym);
}

SymmetryTransform identity_symmetry(const ModelSpec & spec)
{
  switch (spec.tag) {
    case CaseTag::C11: return Case11Symmetry{};
    case CaseTag::C12: return Case12Symmetry{};
    case CaseTag::C211: return Case211Symmetry{};
    case CaseTag::C212: return Case212Symmetry{};
    case CaseTag::C22: return Case22Symmetry{};
    case CaseTag::C231: return Case231Symmetry{};
    default: throw InvalidArgument("symmetry: no residual group for " + std::string(to_string(spec.tag)));
  }
}

StateVec apply_symmetry(const ModelSpec & spec, const SymmetryTransform & sym, const StateVec & x)
{
  validate_symmetry(spec, sym);
  require_in_domain(spec, x, "source point");
  const auto & p = spec.params;
  const StateVec y = std::visit(
    Overloaded{
      [&](const Case11Symmetry & s) { return make_vec({x[0] + s.a, std::exp(-p.c1 * s.a) * x[1] + s.b}); },
      [&](const Case12Symmetry & s) { return make_vec({s.a * x[0] + s.b, s.a * x[1]}); },
      [&](const Case211Symmetry & s) {
        const auto basis = case211_symmetry_basis(p.c2, p.c3);
        return make_vec({x[0] + s.a, x[1] + eval_combination(basis, s.phi0, x[0], 0),
                         x[2] + eval_combination(basis, s.phi0, x[0], 1)});
      },
      [&](const Case212Symmetry & s) { return make_vec({x[0] + s.a, s.b * x[1] + s.c, s.b * x[2]}); },
      [&](const Case22Symmetry & s) {
        const double den = s.c * x[0] + s.d;
        if (den == 0.0) throw DomainError("apply_symmetry: source point on the LFT pole");
        const double det = s.a * s.d - s.b * s.c;
        const double dphi = det / (den * den);
        const double ddphi = -2.0 * s.c * det / (den * den * den);
        return make_vec({(s.a * x[0] + s.b) / den, dphi * x[1], dphi * x[2] + ddphi * x[1] * x[1]});
      },
      [&](const Case231Symmetry & s) {
        const auto basis = case231_symmetry_basis(p.epsilon, p.c2);
        const std::array<double, 2> b{s.b1, s.b2};
        const double x2 = x[1] - s.a;
        return make_vec({x[0] + eval_combination(basis, b, x2, 0), x2, x[2] + eval_combination(basis, b, x2, 1)});
      },
    },
    sym);
  require_in_domain(spec, y, "image");
  return y;
}

SymmetryTransform compose(const ModelSpec & spec, const SymmetryTransform & outer, const SymmetryTransform & inner)
{
  validate_symmetry(spec, outer);
  validate_symmetry(spec, inner);
  switch (spec.tag) {
    case CaseTag::C11: {
      const auto & g = std::get<Case11Symmetry>(outer);
      const auto & h = std::get<Case11Symmetry>(inner);
      return Case11Symmetry{g.a + h.a, std::exp(-spec.params.c1 * g.a) * h.b + g.b};
    }
    case CaseTag::C12: {
      const auto & g = std::get<Case12Symmetry>(outer);
      const auto & h = std::get<Case12Symmetry>(inner);
      return Case12Symmetry{g.a * h.a, g.a * h.b + g.b};
    }
    case CaseTag::C212: {
      const auto & g = std::get<Case212Symmetry>(outer);
      const auto & h = std::get<Case212Symmetry>(inner);
      return Case212Symmetry{g.a + h.a, g.b * h.b, g.b * h.c + g.c};
    }
    case CaseTag::C22: {
      const auto & g = std::get<Case22Symmetry>(outer);
      const auto & h = std::get<Case22Symmetry>(inner);
      return Case22Symmetry{g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c,
                            g.c * h.b + g.d * h.d};
    }
    default: throw InvalidArgument("compose: not implemented for " + std::string(to_string(spec.tag)));
  }
}

SymmetryTransform random_symmetry(const ModelSpec & spec, Rng & rng)
{
  const auto small = [&rng] { return rng.uniform(-0.2, 0.2); };
  switch (spec.tag) {
    case CaseTag::C11: return Case11Symmetry{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    case CaseTag::C12: return Case12Symmetry{rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)};
    case CaseTag::C211: return Case211Symmetry{rng.uniform(-0.5, 0.5), {small(), small()}};
    case CaseTag::C212: return Case212Symmetry{rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)};
    case CaseTag::C22: {
      // |c| + |d - 1| <= 0.4 keeps c x1 + d >= 0.6 on |x1| <= 1.
      const double a = 1.0 + small();
      const double b = small();
      const double c = small();
      const double d = 1.0 + small();
      return Case22Symmetry{a, b, c, d};
    }
    case CaseTag::C231: return Case231Symmetry{rng.uniform(-0.5, 0.5), small(), small()};
    default: throw InvalidArgument("random_symmetry: no residual group for " + std::string(to_string(spec.tag)));
  }
}

double IsometryResidual::max() const
{
  return std::max({drift_err, span_err, metric_err});
}

IsometryResidual isometry_residual(const ModelSpec & spec, const PointMap & map, const StateVec & x, double h)
{
  if (!(h > 0.0)) throw InvalidArgument("isometry_residual: h must be positive");
  require_domain(spec, x, "isometry_residual");
  const int n = spec.dim();
  const StateVec y = map(x);
  require_domain(spec, y, "isometry_residual");
  Mat jac(n, n);
  for (int j = 0; j < n; ++j) {
    StateVec xp = x;
    StateVec xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (map(xp) - map(xm)) / (2.0 * h);
  }
  const StateVec w1 = jac * drift(spec, x);
  const StateVec w2 = jac * control_field(spec, x);
  const StateVec v1 = drift(spec, y);
  const StateVec v2 = control_field(spec, y);

  IsometryResidual r;
  r.drift_err = (w1 - v1).norm();
  const double v2sq = v2.squaredNorm();
  r.span_err = (w2 - (w2.dot(v2) / v2sq) * v2).norm() / w2.norm();
  const double u_image = (w1 + w2 - v1).dot(v2) / v2sq;
  r.metric_err = std::abs(cost_Q(spec, x, 1.0) - cost_Q(spec, y, u_image));
  return r;
}

IsometryResidual isometry_residual(const ModelSpec & spec, const SymmetryTransform & sym, const StateVec & x, double h)
{
  return isometry_residual(spec, [&](const StateVec & z) { return apply_symmetry(spec, sym, z); }, x, h);
}

double admissibility_residual(const ModelSpec & spec, const std::vector<double> & times,
                              const std::vector<StateVec> & states)
{
  if (times.size() != states.size() || times.size() < 3) {
    throw InvalidArgument("admissibility_residual: need at least 3 matching nodes");
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const StateVec xdot = (states[i + 1] - states[i - 1]) / (times[i + 1] - times[i - 1]);
    const StateVec off = xdot - drift(spec, states[i]);
    const StateVec v2 = control_field(spec, states[i]);
    worst = std::max(worst, (off - (off.dot(v2) / v2.squaredNorm()) * v2).norm());
  }
  return worst;
}

double a9_lhs(const ModelSpec & spec, const StateVec & x, double h)
{
  require_case23(spec, "a9_lhs");
  if (!(h > 0.0)) throw InvalidArgument("a9_lhs: h must be positive");
  require_domain(spec, x, "a9_lhs");
  const long long component = domain_component(spec, x);
  const auto H = [&](const StateVec & z) { return case23_H_checked(spec, z, component); };
  const auto H1 = [&](const StateVec & z) { return case23_H1_checked(spec, z, component); };
  const auto v = case23_values(spec, x);
  const double eH1 = spec.params.epsilon * v.H_x1;
  if (!(eH1 > 0.0)) throw DomainError("a9_lhs: eps H_x1 must be positive");
  const double H11 = d1(H1, x, 0, h);
  const double H12 = d1(H1, x, 1, h);
  const double H13 = d1(H1, x, 2, h);
  const double H3 = d1(H, x, 2, h);
  return (H12 + x[2] * H11 + v.H * H13 - 2.0 * v.H_x1 * H3) / (v.H_x1 * std::sqrt(eH1));
}

double pde_residual_A9(const ModelSpec & spec, const StateVec & x, double expected_c2, double h)
{
  return std::abs(a9_lhs(spec, x, h) + 2.0 * expected_c2);
}

double a9_expected_c2(const ModelSpec & spec)
{
  require_case23(spec, "a9_expected_c2");
  return spec.tag == CaseTag::C231 ? spec.params.epsilon * spec.params.c2 : 0.0;
}

double schwarzian_x1(const ModelSpec & spec, const StateVec & x, double h)
{
  require_case23(spec, "schwarzian_x1");
  if (!(h > 0.0)) throw InvalidArgument("schwarzian_x1: h must be positive");
  require_domain(spec, x, "schwarzian_x1");
  const long long component = domain_component(spec, x);
  double f[5];
  for (int k = -2; k <= 2; ++k) {
    const StateVec z = x + (k * h) * StateVec::Unit(x.size(), 0);
    f[k + 2] = case23_H_checked(spec, z, component);
  }
  const double H1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
  const double H11 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
  const double H111 = (-f[0] + 2.0 * f[1] - 2.0 * f[3] + f[4]) / (2.0 * h * h * h);
  if (std::abs(H1) < 1e-12) throw DomainError("schwarzian_x1: H_x1 vanishes");
  const double r = H11 / H1;
  return 0.75 * r * r - 0.5 * H111 / H1;
}

}  // namespace pag
