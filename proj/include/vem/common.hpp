#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace vem {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for every failure this library reports.
class VemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public VemError {
 public:
  using VemError::VemError;
};

class InvalidGridError : public VemError {
 public:
  using VemError::VemError;
};

class AssemblyError : public VemError {
 public:
  using VemError::VemError;
};

class ControllabilityError : public VemError {
 public:
  using VemError::VemError;
};

class MultiplierSolveError : public VemError {
 public:
  using VemError::VemError;
};

class ActiveSetError : public VemError {
 public:
  using VemError::VemError;
};

class PropagationError : public VemError {
 public:
  using VemError::VemError;
};

class RhsError : public VemError {
 public:
  using VemError::VemError;
};

class InfeasibleInitError : public VemError {
 public:
  using VemError::VemError;
};

}  // namespace vem
