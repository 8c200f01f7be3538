#include "pag/coframing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pag {

StructureTensor::StructureTensor(int dim) : dim_(dim)
{
  if (dim != 2 && dim != 3) throw InvalidArgument("StructureTensor: dimension must be 2 or 3");
}

double StructureTensor::operator()(int i, int j, int k) const
{
  if (i < 1 || j < 1 || k < 1 || i > dim_ || j > dim_ || k > dim_) {
    throw InvalidArgument("StructureTensor: index out of range");
  }
  return t_[((i - 1) * 3 + (j - 1)) * 3 + (k - 1)];
}

void StructureTensor::set(int i, int j, int k, double value)
{
  if (i < 1 || j < 1 || k < 1 || i > dim_ || j > dim_ || k > dim_ || j == k) {
    throw InvalidArgument("StructureTensor: index out of range");
  }
  t_[((i - 1) * 3 + (j - 1)) * 3 + (k - 1)] = value;
  t_[((i - 1) * 3 + (k - 1)) * 3 + (j - 1)] = -value;
}

Mat canonical_frame(const ModelSpec & spec, const StateVec & x)
{
  require_domain(spec, x, "canonical_frame");
  const int n = spec.dim();
  const StateVec v1 = drift(spec, x);
  const StateVec v2 = control_field(spec, x);
  const auto s = canonical_control_scale(spec, x);
  Mat frame(n, n);
  frame.col(0) = v1;
  frame.col(1) = s.value * v2;
  if (n == 3) {
    // -[v1, s v2] = s v3 - (v1 s) v2
    frame.col(2) = s.value * frame_v3(spec, x) - s.grad.dot(v1) * v2;
  }
  return frame;
}

CoframeValue coframe(const ModelSpec & spec, const StateVec & x)
{
  require_domain(spec, x, "coframe");
  const auto & p = spec.params;
  const int n = spec.dim();
  Mat rows = Mat::Zero(n, n);
  switch (spec.tag) {
    case CaseTag::C11:
      rows(0, 0) = 1.0;
      rows(1, 1) = std::exp(p.c1 * x[0]);
      break;
    case CaseTag::C12:
      rows(0, 0) = 1.0 / x[1];
      rows(1, 0) = -p.j0 / x[1];
      rows(1, 1) = 1.0 / x[1];
      break;
    case CaseTag::C211: {
      const double J = p.c2 * x[1] + p.c3 * x[2];
      rows(0, 0) = 1.0;
      // eta^2 = dx3 - J dx1 - c3 (dx2 - x3 dx1)
      rows(1, 0) = -J + p.c3 * x[2];
      rows(1, 1) = -p.c3;
      rows(1, 2) = 1.0;
      rows(2, 0) = -x[2];
      rows(2, 1) = 1.0;
      break;
    }
    case CaseTag::C212: {
      const double s = p.c1 * x[2];
      rows(0, 0) = 1.0;
      rows(1, 0) = -p.c3 * x[2] / s;
      rows(1, 2) = 1.0 / s;
      rows(2, 0) = -x[2] / s;
      rows(2, 1) = 1.0 / s;
      break;
    }
    case CaseTag::C22: {
      const double x2 = x[1];
      const double x3 = x[2];
      const double J = 1.5 * x3 * x3 / (x2 * x2) + p.c1;
      const double J3 = 3.0 * x3 / (x2 * x2);
      const double k = J3 - x3 / (x2 * x2);
      rows(0, 0) = 1.0 / x2;
      rows(1, 0) = -J / x2 - k * (-x3 / x2);
      rows(1, 1) = -k;
      rows(1, 2) = 1.0 / x2;
      rows(2, 0) = -x3 / (x2 * x2);
      rows(2, 1) = 1.0 / x2;
      break;
    }
    case CaseTag::C231:
    case CaseTag::C232:
    case CaseTag::C233: {
      const auto v = case23_values(spec, x);
      const double eps = p.epsilon;
      const double root = std::sqrt(eps * v.H_x1);
      Vec eta1 = make_vec({1.0, -x[2], 0.0});
      Vec eta3 = make_vec({0.0, v.H, -1.0}) / root;
      Vec dx2 = make_vec({0.0, 1.0, 0.0});
      Vec eta2 = eps * root * (dx2 - v.J * eta1);
      // Remove the e3 component so that eta^2(e3) = 0.
      const Vec e3 = canonical_frame(spec, x).col(2);
      eta2 -= eta2.dot(e3) * eta3;
      rows.row(0) = eta1.transpose();
      rows.row(1) = eta2.transpose();
      rows.row(2) = eta3.transpose();
      break;
    }
  }
  return {rows};
}

double duality_error(const ModelSpec & spec, const StateVec & x)
{
  const Mat prod = coframe(spec, x).rows * canonical_frame(spec, x);
  return (prod - Mat::Identity(spec.dim(), spec.dim())).cwiseAbs().maxCoeff();
}

namespace {

// dF/dx_l for every l, from central differences.
std::vector<Mat> frame_partials(const MatrixField & frame, const DomainPredicate & domain, const StateVec & x,
                                double h)
{
  const auto n = x.size();
  std::vector<Mat> partials;
  partials.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) {
    StateVec hi = x;
    StateVec lo = x;
    hi[l] += h;
    lo[l] -= h;
    if (!domain(hi) || !domain(lo)) throw DomainError("structure_functions: stencil point leaves the domain");
    partials.push_back((frame(hi) - frame(lo)) / (2.0 * h));
  }
  return partials;
}

Vec bracket_from_partials(const std::vector<Mat> & partials, const Mat & frame_at_x, int j, int k)
{
  const auto n = frame_at_x.rows();
  Vec out = Vec::Zero(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const auto & d = partials[static_cast<std::size_t>(l)];
    out += frame_at_x(l, j) * d.col(k) - frame_at_x(l, k) * d.col(j);
  }
  return out;
}

void require_step(double h)
{
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("structure_functions: step must be positive");
}

}  // namespace

Vec lie_bracket_fd(const MatrixField & frame, int j, int k, const StateVec & x, double h)
{
  require_step(h);
  const auto everywhere = [](const StateVec &) { return true; };
  return bracket_from_partials(frame_partials(frame, everywhere, x, h), frame(x), j, k);
}

StructureTensor structure_functions(const MatrixField & frame, const MatrixField & coframe_rows,
                                    const DomainPredicate & domain, const StateVec & x, double h)
{
  require_step(h);
  if (!domain(x)) throw DomainError("structure_functions: point outside the domain");
  const Mat F = frame(x);
  const Mat eta = coframe_rows(x);
  const int n = static_cast<int>(F.cols());
  const auto partials = frame_partials(frame, domain, x, h);
  StructureTensor T(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const Vec coeffs = -(eta * bracket_from_partials(partials, F, j, k));
      for (int i = 0; i < n; ++i) T.set(i + 1, j + 1, k + 1, coeffs[i]);
    }
  }
  return T;
}

StructureTensor structure_functions(const ModelSpec & spec, const StateVec & x, double h)
{
  require_domain(spec, x, "structure_functions");
  return structure_functions([&](const StateVec & y) { return canonical_frame(spec, y); },
                             [&](const StateVec & y) { return coframe(spec, y).rows; },
                             [&](const StateVec & y) { return in_domain(spec, y); }, x, h);
}

HomogeneityResult homogeneity_from_tensors(const std::vector<StructureTensor> & tensors, double tol)
{
  if (tensors.size() < 2) throw InvalidArgument("homogeneity_check: at least two valid points are required");
  const int n = tensors.front().dim();
  double spread = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int k = j + 1; k <= n; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto & T : tensors) {
          lo = std::min(lo, T(i, j, k));
          hi = std::max(hi, T(i, j, k));
        }
        spread = std::max(spread, hi - lo);
      }
    }
  }
  return {spread <= tol, spread, tensors.size()};
}

HomogeneityResult homogeneity_check(const MatrixField & frame, const MatrixField & coframe_rows,
                                    const DomainPredicate & domain, const std::vector<StateVec> & points,
                                    double h, double tol)
{
  std::vector<StructureTensor> tensors;
  for (const auto & x : points) {
    if (!domain(x)) continue;
    tensors.push_back(structure_functions(frame, coframe_rows, domain, x, h));
  }
  return homogeneity_from_tensors(tensors, tol);
}

HomogeneityResult homogeneity_check(const ModelSpec & spec, const std::vector<StateVec> & points, double h,
                                    double tol)
{
  std::vector<StructureTensor> tensors;
  for (const auto & x : points) {
    if (!in_domain(spec, x)) continue;
    tensors.push_back(structure_functions(spec, x, h));
  }
  return homogeneity_from_tensors(tensors, tol);
}

}  // namespace pag
