#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pag/models.hpp"

namespace pag {

/// A point of T*M.
struct PhasePoint
{
  StateVec x;
  Covector p;
};

struct FirstIntegral
{
  std::string name;
  std::complex<double> value;
  /// True when the integral is genuinely complex for this model (C231 with complex roots).
  bool complex_valued = false;
};

/// H plus the case's known first integrals, in a fixed per-case order.
struct FirstIntegralSet
{
  std::vector<FirstIntegral> entries;

  std::size_t size() const { return entries.size(); }
  const FirstIntegral & operator[](std::size_t i) const { return entries[i]; }
};

/// Roots of r^2 - eps c r - eps = 0 (the C231 characteristic quadratic).
struct CharRoots
{
  std::complex<double> r1;
  std::complex<double> r2;
};

struct PhaseVelocity
{
  StateVec xdot;
  Covector pdot;
};

/// u* = <p, v2> / G, the maximizer of <p, v1 + u v2> - 1/2 G u^2.
double optimal_control(const ModelSpec & spec, const PhasePoint & pt);

/// Hamiltonian before maximization over u.
double control_hamiltonian(const ModelSpec & spec, const PhasePoint & pt, double u);

/// Maximized Hamiltonian  <p, v1> + <p, v2>^2 / (2 G).
double hamiltonian(const ModelSpec & spec, const PhasePoint & pt);

/// Hamilton's equations from the analytic field Jacobians.
PhaseVelocity hamilton_rhs(const ModelSpec & spec, const PhasePoint & pt);

/// Central finite differences of `hamiltonian`; the oracle for hamilton_rhs.
PhaseVelocity hamilton_rhs_fd(const ModelSpec & spec, const PhasePoint & pt, double h = 1e-5);

FirstIntegralSet first_integrals(const ModelSpec & spec, const PhasePoint & pt);

/// Solves I1 = k1, I2 = k2, I3 = k3 of C22 for the covector at x (requires x2 != 0).
Covector reduce_momenta_case22(const StateVec & x, double k1, double k2, double k3);

/// r1, r2 = (eps c +- sqrt(c^2 + 4 eps)) / 2 with c the C231 constant c2.
CharRoots characteristic_roots(double epsilon, double c);
CharRoots characteristic_roots_case231(const ModelSpec & spec);

void require_phase_point(const ModelSpec & spec, const PhasePoint & pt, std::string_view where);

}  // namespace pag
