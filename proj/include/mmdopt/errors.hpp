#pragma once

#include <stdexcept>
#include <string>

namespace mmdopt {

// Thrown when a linear solve or factorization cannot deliver a usable result
// (singular KKT systems, ridge rescue exhausted, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by file loaders on malformed input; the message names the offending
// field or sample index.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mmdopt
