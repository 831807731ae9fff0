#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched sequence lengths or otherwise inconsistent in-memory structures.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Degenerate geometry, e.g. a zero-length bar.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input files. Messages carry the offending
/// location (JSON path and, for parse failures, the byte offset).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The constraint set does not remove every rigid-body mode, or a blended
/// iteration matrix lost positive definiteness.
class ModelingError : public Error {
 public:
  using Error::Error;
};

/// A local projection onto the constitutive curve hit its iteration cap.
class ProjectionError : public Error {
 public:
  ProjectionError(const std::string& what, std::size_t element, double last_iterate)
      : Error(what), element_(element), last_iterate_(last_iterate) {}

  std::size_t element() const noexcept { return element_; }
  double last_iterate() const noexcept { return last_iterate_; }

 private:
  std::size_t element_;
  double last_iterate_;
};

}  // namespace psi
