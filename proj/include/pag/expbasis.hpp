#pragma once

#include <complex>
#include <vector>

namespace pag {

/// One real solution of a constant-coefficient linear ODE:
/// t^power e^(alpha t) times 1, cos(beta t) or sin(beta t).
struct BasisTerm
{
  enum class Kind { real, cos, sin };

  double alpha = 0.0;
  double beta = 0.0;
  int power = 0;
  Kind kind = Kind::real;
};

/// Real fundamental system for the given characteristic roots (a real polynomial's roots,
/// conjugate pairs both present). Roots closer than `tol` are merged into one repeated root.
/// Order: real part descending, then imaginary part ascending; within a root by power,
/// cos before sin.
std::vector<BasisTerm> real_basis(const std::vector<std::complex<double>> & roots, double tol = 1e-9);

/// d^order/dt^order of a basis term at t.
template <class T>
T eval_basis_term(const BasisTerm & term, T t, int order = 0)
{
  const std::complex<T> z(static_cast<T>(term.alpha), static_cast<T>(term.beta));
  const std::complex<T> ez = std::exp(z * t);
  // Leibniz rule on t^j e^(z t).
  std::complex<T> acc(0);
  T binom = 1;
  for (int i = 0; i <= order && i <= term.power; ++i) {
    T falling = 1;
    for (int r = 0; r < i; ++r) falling *= static_cast<T>(term.power - r);
    std::complex<T> zpow(1);
    for (int r = 0; r < order - i; ++r) zpow *= z;
    T tpow = 1;
    for (int r = 0; r < term.power - i; ++r) tpow *= t;
    acc += binom * falling * tpow * zpow;
    binom = binom * static_cast<T>(order - i) / static_cast<T>(i + 1);
  }
  const std::complex<T> value = acc * ez;
  return term.kind == BasisTerm::Kind::sin ? value.imag() : value.real();
}

template <class T, class Coeffs>
T eval_combination(const std::vector<BasisTerm> & basis, const Coeffs & coeffs, T t, int order = 0)
{
  T sum = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) sum += static_cast<T>(coeffs[i]) * eval_basis_term(basis[i], t, order);
  return sum;
}

}  // namespace pag
