#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pag/models.hpp"

namespace pag {

/// Row i holds the components of eta^i in the basis dx^1..dx^n.
struct CoframeValue
{
  Mat rows;
};

/// T^i_jk with dEta^i = sum_{j<k} T^i_jk eta^j ^ eta^k. Indices are 1-based as in the
/// usual notation; storage is fully antisymmetric in (j, k).
class StructureTensor
{
public:
  explicit StructureTensor(int dim = 3);

  int dim() const { return dim_; }
  double operator()(int i, int j, int k) const;
  /// Sets T^i_jk and T^i_kj = -T^i_jk.
  void set(int i, int j, int k, double value);

private:
  int dim_;
  std::array<double, 27> t_{};
};

using MatrixField = std::function<Mat(const StateVec &)>;
using DomainPredicate = std::function<bool(const StateVec &)>;

/// Columns e1, e2[, e3] of the canonical frame: e1 = v1, e2 = s v2 with s the case's
/// canonical scale, e3 = -[e1, e2].
Mat canonical_frame(const ModelSpec & spec, const StateVec & x);

/// Analytic coframe dual to canonical_frame.
CoframeValue coframe(const ModelSpec & spec, const StateVec & x);

/// Finite-difference Lie bracket [X, Y] = DY X - DX Y of two columns of a frame field.
Vec lie_bracket_fd(const MatrixField & frame, int j, int k, const StateVec & x, double h);

/// T^i_jk = -eta^i([e_j, e_k]) with central-difference frame Jacobians.
StructureTensor structure_functions(const ModelSpec & spec, const StateVec & x, double h = 1e-5);

/// Same computation for an arbitrary frame/coframe pair (used for perturbed-metric controls).
StructureTensor structure_functions(const MatrixField & frame, const MatrixField & coframe_rows,
                                    const DomainPredicate & domain, const StateVec & x, double h = 1e-5);

struct HomogeneityResult
{
  bool pass = false;
  double max_spread = 0.0;
  std::size_t points_used = 0;
};

/// Range of each T^i_jk over the tensors; pass iff the largest range is within tol.
HomogeneityResult homogeneity_from_tensors(const std::vector<StructureTensor> & tensors, double tol);

/// Out-of-domain points are skipped; fewer than two usable points is an error.
HomogeneityResult homogeneity_check(const ModelSpec & spec, const std::vector<StateVec> & points, double h = 1e-5,
                                    double tol = 1e-5);

HomogeneityResult homogeneity_check(const MatrixField & frame, const MatrixField & coframe_rows,
                                    const DomainPredicate & domain, const std::vector<StateVec> & points,
                                    double h = 1e-5, double tol = 1e-5);

/// max |coframe * frame - I| at x.
double duality_error(const ModelSpec & spec, const StateVec & x);

}  // namespace pag
