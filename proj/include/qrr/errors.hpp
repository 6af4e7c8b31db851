#pragma once

#include <stdexcept>
#include <string>

namespace qrr {

// Base class for every failure raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OrderMismatch : public Error {
 public:
  OrderMismatch(int lhs, int rhs)
      : Error("truncation order mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

class DivergentProduct : public Error {
 public:
  using Error::Error;
};

class DivergentSum : public Error {
 public:
  using Error::Error;
};

class SingularTerm : public Error {
 public:
  using Error::Error;
};

class WindowUnderspecified : public Error {
 public:
  using Error::Error;
};

class UnknownIdentity : public Error {
 public:
  explicit UnknownIdentity(const std::string& id) : Error("unknown identity: " + id) {}
};

}  // namespace qrr
