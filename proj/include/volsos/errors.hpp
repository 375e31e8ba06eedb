#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace volsos {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class BasisMismatch : public Error {
 public:
  using Error::Error;
};

// Some g_i^K(0) <= 0: the origin is not interior to K.
class InteriorViolation : public Error {
 public:
  InteriorViolation(const std::string& what, int index, double value)
      : Error(what), inequality_index(index), value_at_origin(value) {}
  int inequality_index;
  double value_at_origin;
};

// A sampled point lies in K but not in X (or not in the unit ball).
class InclusionViolation : public Error {
 public:
  InclusionViolation(const std::string& what, std::vector<double> point)
      : Error(what), witness(std::move(point)) {}
  std::vector<double> witness;
};

class NoFeasibleBox : public Error {
 public:
  using Error::Error;
};

class DegreeTooSmall : public Error {
 public:
  using Error::Error;
};

class CertificateMismatch : public Error {
 public:
  using Error::Error;
};

class LpInfeasible : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  GridTooCoarse(const std::string& what, double violation)
      : Error(what), worst_violation(violation) {}
  double worst_violation;
};

class DegenerateBoundary : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Problem-file or CSV input errors; line/column are 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(what), line(line), column(column) {}
  int line;
  int column;
};

}  // namespace volsos
