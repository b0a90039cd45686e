#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sectoria {

using Real = double;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative singular-value threshold used for every rank decision (kernels,
// intersections, domains of relations).  One knob keeps them consistent.
inline constexpr double kDefaultRankTol = 1e-10;

// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class AmbientMismatch : public Error {
 public:
  using Error::Error;
};

// A vector handed to a form lies outside the form domain.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

class NotSectorialError : public Error {
 public:
  using Error::Error;
};

class NotMSectorialError : public Error {
 public:
  using Error::Error;
};

class NotInResolventSet : public Error {
 public:
  using Error::Error;
};

// single_valued_part could not reconstruct the relation from its operator
// part; the input was not m-sectorial.
class DecompositionFailure : public Error {
 public:
  using Error::Error;
};

class EllipticityFailure : public Error {
 public:
  using Error::Error;
};

// A consistency-bridge hypothesis failed; `hypothesis()` names which one.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(std::string hypothesis, const std::string& what)
      : Error(what), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const { return hypothesis_; }

 private:
  std::string hypothesis_;
};

class MissingBoundConstants : public Error {
 public:
  using Error::Error;
};

class MismatchWithFormB : public Error {
 public:
  using Error::Error;
};

class ProjectorViolation : public Error {
 public:
  using Error::Error;
};

// The auxiliary-space map cannot be reduced to an injective one, so no
// projector in H represents the vanishing set.
class NotClosableFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ScenarioFailure : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace sectoria
