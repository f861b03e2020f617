#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace simplexflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Column j of a PointSet is the position of atom j.
using PointSet = Eigen::MatrixXd;

// Raised when an iterative numerical procedure cannot make progress
// (step-size underflow, pivot limit, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace simplexflow
