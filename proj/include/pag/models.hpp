#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pag/types.hpp"

namespace pag {

/// The eight homogeneous point-affine systems with quadratic cost.
///
/// C11, C12 live on a 2-manifold; the remaining six on a 3-manifold.
/// Every case has the form  xdot = v1(x) + u v2(x)  with cost  Q = 1/2 G(x) u^2.
enum class CaseTag { C11, C12, C211, C212, C22, C231, C232, C233 };

inline constexpr CaseTag kAllCases[] = {
  CaseTag::C11, CaseTag::C12, CaseTag::C211, CaseTag::C212,
  CaseTag::C22, CaseTag::C231, CaseTag::C232, CaseTag::C233};

std::string_view to_string(CaseTag tag);
std::optional<CaseTag> parse_case(std::string_view name);
int case_dim(CaseTag tag);

/// Model constants. Each case reads only the ones it needs.
struct ModelParams
{
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double j0 = 0.0;
  double g0 = 1.0;
  double epsilon = 1.0;
};

struct ModelSpec
{
  CaseTag tag = CaseTag::C11;
  ModelParams params{};
  /// Coefficients of F20(x2) = sum_k f20[k] (x2)^k (C232/C233 only). Empty is the zero function.
  std::vector<double> f20{};

  int dim() const { return case_dim(tag); }
};

/// Names of the constants a case reads, in display order.
std::vector<std::string_view> parameter_names(CaseTag tag);

/// Every violated parameter constraint, human readable. Empty means valid.
std::vector<std::string> validate(const ModelSpec & spec);

/// True iff all formulas of the case are finite at x and G(x) > 0.
bool in_domain(const ModelSpec & spec, const StateVec & x);

/// Distance-like measure to the nearest singular locus (|x2|, |x3|, |cos c3 x1|, the
/// square-root radicand). +infinity for cases without singular loci.
double singular_margin(const ModelSpec & spec, const StateVec & x);

/// Label of the connected piece of the domain containing x (sign of x2 or x3, branch of
/// tan c3 x1). Two points with different labels are separated by a singular locus.
long long domain_component(const ModelSpec & spec, const StateVec & x);

StateVec drift(const ModelSpec & spec, const StateVec & x);
StateVec control_field(const ModelSpec & spec, const StateVec & x);
double metric_G(const ModelSpec & spec, const StateVec & x);
double cost_Q(const ModelSpec & spec, const StateVec & x, double u);

/// v3 = -[v1, v2] for the 3-state cases, from the analytic Jacobians.
StateVec frame_v3(const ModelSpec & spec, const StateVec & x);

/// Analytic first derivatives of the model data at a point.
/// Jacobians are d(field^i)/dx^j (row i, column j).
struct FieldJacobians
{
  Mat drift;
  Mat control;
  Vec grad_G;
};

FieldJacobians jacobians(const ModelSpec & spec, const StateVec & x);

/// Scale s(x) with e2 = s v2 the canonical control direction, and its gradient.
/// s = 1/sqrt(G) for C11, C211, C212 (signed c1 x3 for C212), 1 for C12, C22, C231 and
/// 1/sqrt(eps H_x1) for C232/C233.
struct ScaleField
{
  double value;
  Vec grad;
};

ScaleField canonical_control_scale(const ModelSpec & spec, const StateVec & x);

/// H(x) of the 2.3 family: the x3 component of the span direction (x3, 1, H).
double case23_H(const ModelSpec & spec, const StateVec & x);

/// H, dH/dx1 and J of the 2.3 family at x.
struct Case23Values
{
  double H;
  double H_x1;
  double J;
};

Case23Values case23_values(const ModelSpec & spec, const StateVec & x);

/// F20 polynomial and its derivative.
double f20_value(const std::vector<double> & coeffs, double x2);
double f20_derivative(const std::vector<double> & coeffs, double x2);

/// Throws DomainError unless x has the right length and in_domain holds.
void require_domain(const ModelSpec & spec, const StateVec & x, std::string_view where);

}  // namespace pag
