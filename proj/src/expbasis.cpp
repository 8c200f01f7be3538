#include "pag/expbasis.hpp"

#include <algorithm>

namespace pag {

namespace {

struct Cluster
{
  std::complex<double> sum;
  int count;

  std::complex<double> center() const { return sum / static_cast<double>(count); }
};

}  // namespace

std::vector<BasisTerm> real_basis(const std::vector<std::complex<double>> & roots, double tol)
{
  std::vector<Cluster> clusters;
  for (const auto & r : roots) {
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const Cluster & c) { return std::abs(c.center() - r) < tol; });
    if (it == clusters.end()) {
      clusters.push_back({r, 1});
    } else {
      it->sum += r;
      ++it->count;
    }
  }

  std::vector<std::pair<std::complex<double>, int>> kept;
  for (const auto & c : clusters) {
    auto z = c.center();
    if (z.imag() < -tol) continue;  // the conjugate of a kept root
    if (std::abs(z.imag()) <= tol) z.imag(0.0);
    kept.emplace_back(z, c.count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto & a, const auto & b) {
    if (a.first.real() != b.first.real()) return a.first.real() > b.first.real();
    return a.first.imag() < b.first.imag();
  });

  std::vector<BasisTerm> basis;
  for (const auto & [z, mult] : kept) {
    for (int j = 0; j < mult; ++j) {
      if (z.imag() == 0.0) {
        basis.push_back({z.real(), 0.0, j, BasisTerm::Kind::real});
      } else {
        basis.push_back({z.real(), z.imag(), j, BasisTerm::Kind::cos});
        basis.push_back({z.real(), z.imag(), j, BasisTerm::Kind::sin});
      }
    }
  }
  return basis;
}

}  // namespace pag
