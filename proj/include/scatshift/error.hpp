#pragma once

#include <stdexcept>
#include <string>

namespace scatshift {

enum class ErrorKind {
  InvalidArgument,
  Unisolvence,
  Convergence,
  Io,
  Certificate,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

/// No admissible local reproduction could be built at a point.
class UnisolvenceFailure : public Error {
 public:
  explicit UnisolvenceFailure(const std::string& what) : Error(ErrorKind::Unisolvence, what) {}
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& what) : Error(ErrorKind::Convergence, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// A numerical certificate (decay bound, Schur bound, invariant check) did not hold.
class CertificateFailure : public Error {
 public:
  explicit CertificateFailure(const std::string& what) : Error(ErrorKind::Certificate, what) {}
};

}  // namespace scatshift
