#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "pag/expbasis.hpp"
#include "pag/pmp.hpp"

namespace pag {

enum class Case12Subcase { c1zero_c2zero, c1zero_c2nonzero, k_zero, k_pos, k_neg };
enum class Case212Subcase { const_slope, exp, tan_family, tanh_family, rational_family };

std::string_view to_string(Case12Subcase s);
std::string_view to_string(Case212Subcase s);
std::optional<Case12Subcase> parse_case12_subcase(std::string_view name);
std::optional<Case212Subcase> parse_case212_subcase(std::string_view name);

/// x1 = t + t0, x2 = c2 x1 + c3 (c1 = 0) or -(c2 / 2c1) e^(-2 c1 x1) + c3.
struct Case11Family
{
  double c2 = 0.0;
  double c3 = 0.0;
  double t0 = 0.0;
};

/// c1 is the conserved p1. The k-subcases use k = g0 (j0^2 g0 - 2 c2) directly; with
/// c1 = 0 the curve is x2 = c3 e^(rate t), rate = j0 + p2 x2 / g0.
struct Case12Family
{
  Case12Subcase subcase = Case12Subcase::c1zero_c2zero;
  double c1 = 0.0;
  double k = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double rate = 0.0;
};

/// x2 = sum coeffs[i] b_i(t) over the real basis of the quartic characteristic roots.
struct Case211Family
{
  std::array<double, 4> coeffs{};
  double t0 = 0.0;
};

struct Case212Family
{
  Case212Subcase subcase = Case212Subcase::const_slope;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  /// Growth rate of the exp family.
  double ctilde = 0.0;
  double t0 = 0.0;
};

using ClosedFormFamily = std::variant<Case11Family, Case12Family, Case211Family, Case212Family>;

CaseTag family_case(const ClosedFormFamily & family);

/// Throws InvalidArgument when the family does not belong to spec's case or violates its guards.
void validate_family(const ModelSpec & spec, const ClosedFormFamily & family);

StateVec case11_trajectory(double c1, double c2, double c3, double t, double t0 = 0.0);
StateVec case12_trajectory(double j0, double g0, const Case12Family & family, double t);
StateVec case211_trajectory(double c2, double c3, const std::array<double, 4> & coeffs, double t0, double t);
StateVec case212_trajectory(double c1, double c3, const Case212Family & family, double t);

/// Roots of (r^2 + c3 r - c2)(r^2 - c3 r - c2) and the matching real basis.
std::vector<std::complex<double>> case211_roots(double c2, double c3);
std::vector<BasisTerm> case211_basis(double c2, double c3);

/// Family state at time t; DomainError within 1e-6 (in t) of a pole.
StateVec evaluate(const ModelSpec & spec, const ClosedFormFamily & family, double t);

/// Earliest pole in [t0, t1], if any.
std::optional<double> first_pole(const ModelSpec & spec, const ClosedFormFamily & family, double t0, double t1);

/// Max residual of the family's reduced ODE at the sample times (finite-difference time
/// derivatives; C211 runs in long double).
double reduced_ode_residual(const ModelSpec & spec, const ClosedFormFamily & family,
                            const std::vector<double> & sample_times, double dt = 1e-4);

/// Residual of `family`'s reduced ODE evaluated on an arbitrary curve (negative controls).
double reduced_ode_residual(const ModelSpec & spec, const ClosedFormFamily & family,
                            const std::function<StateVec(double)> & curve, const std::vector<double> & sample_times,
                            double dt = 1e-4);

/// |x2 - (-(1/(2 c1 g0)) [(c1 x1 - (j0 g0 + c1 c4))^2 - k])| at time t, for the c1 != 0 subcases.
double case12_curve_residual(const ModelSpec & spec, const Case12Family & family, double t);

/// The closed-form family through a phase point, with t = 0 at that point (C11, C12 only).
/// Throws InvalidArgument for other cases or phase points no family reaches.
ClosedFormFamily family_from_phase_point(const ModelSpec & spec, const PhasePoint & pt);

}  // namespace pag
