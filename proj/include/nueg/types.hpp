#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nueg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

// Points live in R^d with d in {1,2,3}; stored as dynamic vectors so that
// one code path serves every dimension.
using Point = Eigen::VectorXd;
using PointList = std::vector<Point>;

// Error categories map one-to-one onto CLI exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class InfeasibleError : public Error {
public:
  using Error::Error;
};

class BudgetError : public Error {
public:
  BudgetError(const std::string& what, long long required)
      : Error(what), required_(required) {}
  long long required() const { return required_; }

private:
  long long required_;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

} // namespace nueg
