#pragma once

#include <stdexcept>
#include <string>

namespace gedfem {

// Constitutive evaluation failed (inverted element, ln of non-positive J,
// degradation underflow). The stepping loop treats this as step rejection.
class ConstitutiveError : public std::runtime_error {
 public:
  explicit ConstitutiveError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed external input: mesh files, configs, weight files.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class WeightConstraintError : public ParseError {
 public:
  explicit WeightConstraintError(const std::string& what) : ParseError(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Linear algebra failure (singular factorization); escalated to step rejection.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gedfem
