#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pag {

// State and covector storage. Dimension is 2 or 3, so everything stays on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

using StateVec = Vec;
using Covector = Vec;

/// Raised when a formula is evaluated outside the model's regular set.
class DomainError : public std::domain_error
{
public:
  explicit DomainError(const std::string & what) : std::domain_error(what) {}
};

/// Raised for malformed inputs (bad case, bad subcase guards, bad config).
class InvalidArgument : public std::invalid_argument
{
public:
  explicit InvalidArgument(const std::string & what) : std::invalid_argument(what) {}
};

inline Vec make_vec(std::initializer_list<double> xs)
{
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace pag
