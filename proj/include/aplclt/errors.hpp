#ifndef APLCLT_ERRORS_HPP_
#define APLCLT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace aplclt {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument value (probability out of range, k < 3, empty window, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The kernel exists but not for these parameters (e.g. convolution with even n).
class UnsupportedParameters : public Error {
 public:
  using Error::Error;
};

// gcd(n, (k-1)!) != 1: progressions may repeat residues, so the p-biased
// expansion is no longer multilinear.
class MultilinearityError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// A bound check was asked outside the parameter range where its
// implication is claimed.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// Requested work exceeds the configured budget.
class ResourceGuardError : public Error {
 public:
  using Error::Error;
};

// A numerical self-check inside the library failed.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace aplclt

#endif  // APLCLT_ERRORS_HPP_
