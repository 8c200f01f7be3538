#include "pag/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pag {

namespace {

constexpr double kPoleGap = 1e-6;
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sech(double v)
{
  return 1.0 / std::cosh(v);
}

// Poles of tan / sec^2 at theta = omega t + phi = pi/2 + n pi.
std::optional<double> first_periodic_pole(double omega, double phi, double t0, double t1)
{
  const double a = omega * t0 + phi;
  const double b = omega * t1 + phi;
  if (omega > 0.0) {
    const double n = std::ceil((a - kPi / 2.0) / kPi);
    const double theta = kPi / 2.0 + n * kPi;
    if (theta <= b) return (theta - phi) / omega;
  } else {
    const double n = std::floor((a - kPi / 2.0) / kPi);
    const double theta = kPi / 2.0 + n * kPi;
    if (theta >= b) return (theta - phi) / omega;
  }
  return std::nullopt;
}

[[noreturn]] void pole_error(double t)
{
  throw DomainError("closed form: t = " + std::to_string(t) + " is at a pole of the family");
}

void check_case12(const Case12Family & f)
{
  switch (f.subcase) {
    case Case12Subcase::c1zero_c2zero:
    case Case12Subcase::c1zero_c2nonzero:
      if (f.c1 != 0.0) throw InvalidArgument("case12: c1 must be zero for the c1zero subcases");
      if (f.c3 == 0.0) throw InvalidArgument("case12: c3 must be nonzero (x2 = 0 is singular)");
      if (f.subcase == Case12Subcase::c1zero_c2zero && f.rate != 0.0) {
        throw InvalidArgument("case12: rate must be zero for c1zero_c2zero");
      }
      if (f.subcase == Case12Subcase::c1zero_c2nonzero && f.rate == 0.0) {
        throw InvalidArgument("case12: rate must be nonzero for c1zero_c2nonzero");
      }
      break;
    case Case12Subcase::k_zero:
    case Case12Subcase::k_pos:
    case Case12Subcase::k_neg:
      if (f.c1 == 0.0) throw InvalidArgument("case12: c1 must be nonzero for the k subcases");
      if (f.subcase == Case12Subcase::k_zero && f.k != 0.0) throw InvalidArgument("case12: k must be zero for k_zero");
      if (f.subcase == Case12Subcase::k_pos && !(f.k > 0.0)) throw InvalidArgument("case12: k must be positive for k_pos");
      if (f.subcase == Case12Subcase::k_neg && !(f.k < 0.0)) throw InvalidArgument("case12: k must be negative for k_neg");
      break;
  }
}

void check_case212(double c1, const Case212Family & f)
{
  if (c1 == 0.0) throw InvalidArgument("case212: c1 must be nonzero");
  switch (f.subcase) {
    case Case212Subcase::const_slope:
      if (f.a == 0.0) throw InvalidArgument("case212: a must be nonzero (x3 = 0 is singular)");
      break;
    case Case212Subcase::exp:
      if (f.a == 0.0 || f.ctilde == 0.0) throw InvalidArgument("case212: a and ctilde must be nonzero");
      break;
    case Case212Subcase::tan_family:
    case Case212Subcase::tanh_family:
      if (f.a == 0.0 || f.b == 0.0) throw InvalidArgument("case212: a and b must be nonzero");
      break;
    case Case212Subcase::rational_family:
      if (f.a == 0.0) throw InvalidArgument("case212: a must be nonzero");
      break;
  }
}

std::optional<double> case12_pole(double g0, const Case12Family & f, double t0, double t1)
{
  if (f.subcase == Case12Subcase::k_zero) {
    const double tp = -f.c3;
    if (tp >= t0 && tp <= t1) return tp;
  } else if (f.subcase == Case12Subcase::k_neg) {
    const double b = std::sqrt(-f.k) / (2.0 * g0);
    return first_periodic_pole(b, b * f.c3, t0, t1);
  }
  return std::nullopt;
}

std::optional<double> case212_pole(const Case212Family & f, double t0, double t1)
{
  if (f.subcase == Case212Subcase::tan_family) return first_periodic_pole(f.b, f.c, t0, t1);
  if (f.subcase == Case212Subcase::rational_family) {
    const double tp = -f.b / f.a;
    if (tp >= t0 && tp <= t1) return tp;
  }
  return std::nullopt;
}

template <class T, class F>
T d1(F && f, T t, T h)
{
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

template <class T, class F>
T d3(F && f, T t, T h)
{
  return (f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) / (2 * h * h * h);
}

// C211 residual for a curve given in scalar type T; the third derivative needs long double.
template <class T, class Curve>
double case211_residual(Curve && curve, double c2, double c3, const std::vector<double> & times, T h1, T h3)
{
  const T lin = static_cast<T>(2.0 * c2 + c3 * c3);
  const T c2sq = static_cast<T>(c2 * c2);
  double worst = 0.0;
  for (double td : times) {
    const T t = static_cast<T>(td);
    const auto x1 = [&](T s) { return curve(s)[0]; };
    const auto x2 = [&](T s) { return curve(s)[1]; };
    const auto x3 = [&](T s) { return curve(s)[2]; };
    const auto here = curve(t);
    const T r1 = d1(x1, t, h1) - 1;
    const T r2 = d1(x2, t, h1) - here[2];
    const T r4 = d3(x3, t, h3) - lin * d1(x3, t, h1) + c2sq * here[1];
    worst = std::max({worst, static_cast<double>(std::abs(r1)), static_cast<double>(std::abs(r2)),
                      static_cast<double>(std::abs(r4))});
  }
  return worst;
}

}  // namespace

std::string_view to_string(Case12Subcase s)
{
  switch (s) {
    case Case12Subcase::c1zero_c2zero: return "c1zero_c2zero";
    case Case12Subcase::c1zero_c2nonzero: return "c1zero_c2nonzero";
    case Case12Subcase::k_zero: return "k_zero";
    case Case12Subcase::k_pos: return "k_pos";
    case Case12Subcase::k_neg: return "k_neg";
  }
  return "?";
}

std::string_view to_string(Case212Subcase s)
{
  switch (s) {
    case Case212Subcase::const_slope: return "const_slope";
    case Case212Subcase::exp: return "exp";
    case Case212Subcase::tan_family: return "tan_family";
    case Case212Subcase::tanh_family: return "tanh_family";
    case Case212Subcase::rational_family: return "rational_family";
  }
  return "?";
}

std::optional<Case12Subcase> parse_case12_subcase(std::string_view name)
{
  for (auto s : {Case12Subcase::c1zero_c2zero, Case12Subcase::c1zero_c2nonzero, Case12Subcase::k_zero,
                 Case12Subcase::k_pos, Case12Subcase::k_neg}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<Case212Subcase> parse_case212_subcase(std::string_view name)
{
  for (auto s : {Case212Subcase::const_slope, Case212Subcase::exp, Case212Subcase::tan_family,
                 Case212Subcase::tanh_family, Case212Subcase::rational_family}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

CaseTag family_case(const ClosedFormFamily & family)
{
  return std::visit(Overloaded{[](const Case11Family &) { return CaseTag::C11; },
                               [](const Case12Family &) { return CaseTag::C12; },
                               [](const Case211Family &) { return CaseTag::C211; },
                               [](const Case212Family &) { return CaseTag::C212; }},
                    family);
}

void validate_family(const ModelSpec & spec, const ClosedFormFamily & family)
{
  if (family_case(family) != spec.tag) {
    throw InvalidArgument("closed form: family belongs to " + std::string(to_string(family_case(family))) +
                          ", model is " + std::string(to_string(spec.tag)));
  }
  const auto errors = validate(spec);
  if (!errors.empty()) throw InvalidArgument("closed form: invalid model: " + errors.front());
  if (const auto * f = std::get_if<Case12Family>(&family)) check_case12(*f);
  if (const auto * f = std::get_if<Case212Family>(&family)) check_case212(spec.params.c1, *f);
}

StateVec case11_trajectory(double c1, double c2, double c3, double t, double t0)
{
  const double x1 = t + t0;
  const double x2 = c1 == 0.0 ? c2 * x1 + c3 : -(c2 / (2.0 * c1)) * std::exp(-2.0 * c1 * x1) + c3;
  return make_vec({x1, x2});
}

StateVec case12_trajectory(double j0, double g0, const Case12Family & f, double t)
{
  check_case12(f);
  if (!(g0 > 0.0)) throw InvalidArgument("case12: g0 must be positive");
  if (const auto tp = case12_pole(g0, f, t - kPoleGap, t + kPoleGap)) pole_error(*tp);
  const double s = t + f.c3;
  const double c1 = f.c1;
  switch (f.subcase) {
    case Case12Subcase::c1zero_c2zero: return make_vec({f.c3 * t + f.c4, f.c3});
    case Case12Subcase::c1zero_c2nonzero: {
      const double e = std::exp(f.rate * t);
      return make_vec({(f.c3 / f.rate) * e + f.c4, f.c3 * e});
    }
    case Case12Subcase::k_zero:
      return make_vec({g0 * (2.0 + j0 * s) / (c1 * s) + f.c4, -2.0 * g0 / (c1 * s * s)});
    case Case12Subcase::k_pos: {
      const double rk = std::sqrt(f.k);
      const double a = rk / (2.0 * g0);
      const double sh = sech(a * s);
      return make_vec({(rk * std::tanh(a * s) + j0 * g0) / c1 + f.c4, f.k / (2.0 * c1 * g0) * sh * sh});
    }
    case Case12Subcase::k_neg: {
      const double rk = std::sqrt(-f.k);
      const double b = rk / (2.0 * g0);
      const double sc = 1.0 / std::cos(b * s);
      return make_vec({-(rk * std::tan(b * s) - j0 * g0) / c1 + f.c4, f.k / (2.0 * c1 * g0) * sc * sc});
    }
  }
  throw InvalidArgument("case12: unknown subcase");
}

std::vector<std::complex<double>> case211_roots(double c2, double c3)
{
  const std::complex<double> disc = std::sqrt(std::complex<double>(c3 * c3 + 4.0 * c2, 0.0));
  return {(-c3 + disc) / 2.0, (-c3 - disc) / 2.0, (c3 + disc) / 2.0, (c3 - disc) / 2.0};
}

std::vector<BasisTerm> case211_basis(double c2, double c3)
{
  return real_basis(case211_roots(c2, c3));
}

namespace {

template <class T>
std::array<T, 3> case211_state(const std::vector<BasisTerm> & basis, const std::array<double, 4> & coeffs, double t0,
                               T t)
{
  return {t + static_cast<T>(t0), eval_combination(basis, coeffs, t, 0), eval_combination(basis, coeffs, t, 1)};
}

}  // namespace

StateVec case211_trajectory(double c2, double c3, const std::array<double, 4> & coeffs, double t0, double t)
{
  const auto s = case211_state(case211_basis(c2, c3), coeffs, t0, t);
  return make_vec({s[0], s[1], s[2]});
}

StateVec case212_trajectory(double c1, double c3, const Case212Family & f, double t)
{
  (void)c3;
  check_case212(c1, f);
  if (const auto tp = case212_pole(f, t - kPoleGap, t + kPoleGap)) pole_error(*tp);
  const double x1 = t + f.t0;
  switch (f.subcase) {
    case Case212Subcase::const_slope: return make_vec({x1, f.a * t + f.b, f.a});
    case Case212Subcase::exp: {
      const double e = std::exp(f.ctilde * t);
      return make_vec({x1, (f.a / f.ctilde) * e + f.b, f.a * e});
    }
    case Case212Subcase::tan_family: {
      const double th = f.b * t + f.c;
      const double sc = 1.0 / std::cos(th);
      return make_vec({x1, f.a * std::tan(th) + f.d, f.a * f.b * sc * sc});
    }
    case Case212Subcase::tanh_family: {
      const double th = f.b * t + f.c;
      const double sh = sech(th);
      return make_vec({x1, f.a * std::tanh(th) + f.d, f.a * f.b * sh * sh});
    }
    case Case212Subcase::rational_family: {
      const double den = f.a * t + f.b;
      return make_vec({x1, 1.0 / den + f.c, -f.a / (den * den)});
    }
  }
  throw InvalidArgument("case212: unknown subcase");
}

StateVec evaluate(const ModelSpec & spec, const ClosedFormFamily & family, double t)
{
  validate_family(spec, family);
  const auto & p = spec.params;
  return std::visit(Overloaded{[&](const Case11Family & f) { return case11_trajectory(p.c1, f.c2, f.c3, t, f.t0); },
                               [&](const Case12Family & f) { return case12_trajectory(p.j0, p.g0, f, t); },
                               [&](const Case211Family & f) { return case211_trajectory(p.c2, p.c3, f.coeffs, f.t0, t); },
                               [&](const Case212Family & f) { return case212_trajectory(p.c1, p.c3, f, t); }},
                    family);
}

std::optional<double> first_pole(const ModelSpec & spec, const ClosedFormFamily & family, double t0, double t1)
{
  validate_family(spec, family);
  if (t1 < t0) std::swap(t0, t1);
  if (const auto * f = std::get_if<Case12Family>(&family)) {
    return case12_pole(spec.params.g0, *f, t0 - kPoleGap, t1 + kPoleGap);
  }
  if (const auto * f = std::get_if<Case212Family>(&family)) return case212_pole(*f, t0 - kPoleGap, t1 + kPoleGap);
  return std::nullopt;
}

double reduced_ode_residual(const ModelSpec & spec, const ClosedFormFamily & family,
                            const std::function<StateVec(double)> & curve, const std::vector<double> & sample_times,
                            double dt)
{
  validate_family(spec, family);
  if (!(dt > 0.0)) throw InvalidArgument("reduced_ode_residual: dt must be positive");
  const auto & p = spec.params;

  if (const auto * f = std::get_if<Case211Family>(&family)) {
    (void)f;
    const auto as_array = [&](double s) {
      const StateVec x = curve(s);
      return std::array<double, 3>{x[0], x[1], x[2]};
    };
    return case211_residual<double>(as_array, p.c2, p.c3, sample_times, dt, 1e-2);
  }

  double worst = 0.0;
  for (double t : sample_times) {
    const StateVec x = curve(t);
    const auto comp = [&](int i) { return [&, i](double s) { return curve(s)[i]; }; };
    const double dx1 = d1(comp(0), t, dt);
    const double dx2 = d1(comp(1), t, dt);
    std::visit(
      Overloaded{
        [&](const Case11Family & f) {
          worst = std::max({worst, std::abs(dx1 - 1.0), std::abs(dx2 - f.c2 * std::exp(-2.0 * p.c1 * x[0]))});
        },
        [&](const Case12Family & f) {
          double lambda = f.rate;
          if (f.c1 != 0.0) lambda = p.j0 + f.c1 * (f.c4 - x[0]) / p.g0;
          worst = std::max({worst, std::abs(dx1 - x[1]), std::abs(dx2 - lambda * x[1])});
        },
        [&](const Case211Family &) {},
        [&](const Case212Family & f) {
          double kappa = 0.0;
          switch (f.subcase) {
            case Case212Subcase::const_slope: kappa = 0.0; break;
            case Case212Subcase::exp: kappa = f.ctilde; break;
            case Case212Subcase::tan_family: kappa = 2.0 * (f.b / f.a) * (x[1] - f.d); break;
            case Case212Subcase::tanh_family: kappa = -2.0 * (f.b / f.a) * (x[1] - f.d); break;
            case Case212Subcase::rational_family: kappa = -2.0 * f.a * (x[1] - f.c); break;
          }
          const double dx3 = d1(comp(2), t, dt);
          worst = std::max({worst, std::abs(dx1 - 1.0), std::abs(dx2 - x[2]), std::abs(dx3 - kappa * x[2])});
        }},
      family);
  }
  return worst;
}

double reduced_ode_residual(const ModelSpec & spec, const ClosedFormFamily & family,
                            const std::vector<double> & sample_times, double dt)
{
  validate_family(spec, family);
  if (const auto * f = std::get_if<Case211Family>(&family)) {
    if (!(dt > 0.0)) throw InvalidArgument("reduced_ode_residual: dt must be positive");
    const auto basis = case211_basis(spec.params.c2, spec.params.c3);
    const auto curve = [&](long double s) { return case211_state<long double>(basis, f->coeffs, f->t0, s); };
    return case211_residual<long double>(curve, spec.params.c2, spec.params.c3, sample_times, 1e-3L, 5e-4L);
  }
  return reduced_ode_residual(
    spec, family, [&](double t) { return evaluate(spec, family, t); }, sample_times, dt);
}

double case12_curve_residual(const ModelSpec & spec, const Case12Family & family, double t)
{
  if (family.c1 == 0.0) throw InvalidArgument("case12_curve_residual: requires c1 != 0");
  const auto & p = spec.params;
  const StateVec x = evaluate(spec, family, t);
  const double c1 = family.c1;
  const double shift = c1 * x[0] - (p.j0 * p.g0 + c1 * family.c4);
  const double predicted = -(shift * shift - family.k) / (2.0 * c1 * p.g0);
  return std::abs(x[1] - predicted);
}

ClosedFormFamily family_from_phase_point(const ModelSpec & spec, const PhasePoint & pt)
{
  if (spec.tag != CaseTag::C11 && spec.tag != CaseTag::C12) {
    throw InvalidArgument("no closed form for " + std::string(to_string(spec.tag)));
  }
  const auto errors = validate(spec);
  if (!errors.empty()) throw InvalidArgument("invalid model: " + errors.front());
  require_phase_point(spec, pt, "family_from_phase_point");
  const auto & p = spec.params;
  const double x1 = pt.x[0];
  const double x2 = pt.x[1];

  if (spec.tag == CaseTag::C11) {
    Case11Family f;
    f.c2 = pt.p[1];
    f.t0 = x1;
    f.c3 = p.c1 == 0.0 ? x2 - f.c2 * x1 : x2 + f.c2 / (2.0 * p.c1) * std::exp(-2.0 * p.c1 * x1);
    return f;
  }

  const double g0 = p.g0;
  const double j0 = p.j0;
  const double w = pt.p[1] * x2;
  Case12Family f;
  f.c1 = pt.p[0];
  if (f.c1 == 0.0) {
    f.rate = j0 + w / g0;
    f.c3 = x2;
    if (f.rate == 0.0) {
      f.subcase = Case12Subcase::c1zero_c2zero;
      f.c4 = x1;
    } else {
      f.subcase = Case12Subcase::c1zero_c2nonzero;
      f.c4 = x1 - x2 / f.rate;
    }
    return f;
  }

  const double H = hamiltonian(spec, pt);
  const double v = w + j0 * g0;
  f.c4 = x1 + w / f.c1;
  f.k = 2.0 * g0 * H + j0 * j0 * g0 * g0;
  const double scale = 2.0 * g0 * std::abs(H) + j0 * j0 * g0 * g0 + v * v;
  if (std::abs(f.k) <= 1e-14 * scale) {
    f.k = 0.0;
    f.subcase = Case12Subcase::k_zero;
    f.c3 = -2.0 * g0 / v;
  } else if (f.k > 0.0) {
    f.subcase = Case12Subcase::k_pos;
    const double rk = std::sqrt(f.k);
    const double arg = -v / rk;
    if (!(std::abs(arg) < 1.0)) {
      throw InvalidArgument("phase point lies on the coth branch (c1 x2 < 0 with k > 0), which no family covers");
    }
    f.c3 = std::atanh(arg) / (rk / (2.0 * g0));
  } else {
    f.subcase = Case12Subcase::k_neg;
    const double rk = std::sqrt(-f.k);
    f.c3 = std::atan(v / rk) / (rk / (2.0 * g0));
  }
  return f;
}

}  // namespace pag
