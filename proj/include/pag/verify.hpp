#pragma once

#include <array>
#include <functional>
#include <variant>
#include <vector>

#include "pag/catalog.hpp"
#include "pag/expbasis.hpp"
#include "pag/models.hpp"

namespace pag {

/// x1 = x~1 + a, x2 = e^(-c1 a) x~2 + b.
struct Case11Symmetry
{
  double a = 0.0;
  double b = 0.0;
};

/// x1 = a x~1 + b, x2 = a x~2 (a != 0).
struct Case12Symmetry
{
  double a = 1.0;
  double b = 0.0;
};

/// x1 = x~1 + a, x2 = x~2 + phi0(x~1), x3 = x~3 + phi0'(x~1), where phi0 solves
/// phi0'' - c3 phi0' - c2 phi0 = 0 and is given by its coefficients in case211_symmetry_basis.
struct Case211Symmetry
{
  double a = 0.0;
  std::array<double, 2> phi0{0.0, 0.0};
};

/// x1 = x~1 + a, x2 = b x~2 + c, x3 = b x~3 (b != 0).
struct Case212Symmetry
{
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
};

/// phi = (a x~1 + b)/(c x~1 + d): x1 = phi, x2 = phi' x~2, x3 = phi' x~3 + phi'' (x~2)^2.
struct Case22Symmetry
{
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
};

/// x2 = x~2 - a, x1 = x~1 + Phi0(x2), x3 = x~3 + Phi0'(x2), where Phi0'' - eps c2 Phi0' - eps Phi0 = 0
/// and (b1, b2) are Phi0's coefficients in case231_symmetry_basis.
struct Case231Symmetry
{
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

using SymmetryTransform =
  std::variant<Case11Symmetry, Case12Symmetry, Case211Symmetry, Case212Symmetry, Case22Symmetry, Case231Symmetry>;

using PointMap = std::function<StateVec(const StateVec &)>;

CaseTag symmetry_case(const SymmetryTransform & sym);

/// True for the cases whose residual group is implemented.
bool has_symmetry_group(CaseTag tag);

/// Real solution basis of phi0'' - c3 phi0' - c2 phi0 = 0.
std::vector<BasisTerm> case211_symmetry_basis(double c2, double c3);

/// Real solution basis of Phi0'' - eps c2 Phi0' - eps Phi0 = 0 (roots from characteristic_roots).
std::vector<BasisTerm> case231_symmetry_basis(double epsilon, double c2);

/// Throws InvalidArgument for another case's transform, non-finite values or degenerate
/// scalings (a = 0 for C12, b = 0 for C212, ad - bc = 0 for C22).
void validate_symmetry(const ModelSpec & spec, const SymmetryTransform & sym);

SymmetryTransform identity_symmetry(const ModelSpec & spec);

/// Throws DomainError when x~ or its image is outside the domain (including LFT poles).
StateVec apply_symmetry(const ModelSpec & spec, const SymmetryTransform & sym, const StateVec & x);

/// apply(compose(outer, inner), x) = apply(outer, apply(inner, x)). C11, C12, C212 and C22.
SymmetryTransform compose(const ModelSpec & spec, const SymmetryTransform & outer, const SymmetryTransform & inner);

/// A group element close enough to the identity that images of default-box points stay in
/// the domain.
SymmetryTransform random_symmetry(const ModelSpec & spec, Rng & rng);

struct IsometryResidual
{
  double drift_err = 0.0;
  double span_err = 0.0;
  double metric_err = 0.0;

  double max() const;
};

/// Pullback mismatch of the point-affine structure and cost under `map`, whose Jacobian is
/// taken by central differences with step h.
IsometryResidual isometry_residual(const ModelSpec & spec, const PointMap & map, const StateVec & x, double h = 1e-5);
IsometryResidual isometry_residual(const ModelSpec & spec, const SymmetryTransform & sym, const StateVec & x,
                                   double h = 1e-5);

/// Max over interior nodes of the part of (dx/dt - v1) orthogonal to v2, with dx/dt by central
/// differences. Zero for curves the system can follow with some control. Nodes must be uniform.
double admissibility_residual(const ModelSpec & spec, const std::vector<double> & times,
                              const std::vector<StateVec> & states);

/// (H_x1x2 + x3 H_x1x1 + H H_x1x3 - 2 H_x1 H_x3) / (H_x1 sqrt(eps H_x1)) for the 2.3 cases.
/// H_x1 is analytic; the remaining partials are central differences with step h.
/// Throws DomainError if eps H_x1 <= 0 or a stencil point leaves the domain.
double a9_lhs(const ModelSpec & spec, const StateVec & x, double h = 1e-4);

/// |a9_lhs + 2 expected_c2|.
double pde_residual_A9(const ModelSpec & spec, const StateVec & x, double expected_c2, double h = 1e-4);

/// The constant the a9_lhs value should equal -2 times: eps c2 for C231, 0 for C232 and C233.
double a9_expected_c2(const ModelSpec & spec);

/// 3/4 (H_x1x1 / H_x1)^2 - 1/2 H_x1x1x1 / H_x1 by 5-point central differences of H in x1.
double schwarzian_x1(const ModelSpec & spec, const StateVec & x, double h = 1e-3);

}  // namespace pag
