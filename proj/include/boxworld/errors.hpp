#pragma once

#include <stdexcept>
#include <string>

namespace boxworld {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A table or index space does not match the layout it is paired with.
class StructuralError : public Error {
public:
  explicit StructuralError(const std::string& what) : Error("structural error: " + what) {}
};

/// A probability table violates normalization, range, or no-signalling.
class InvalidStateError : public Error {
public:
  explicit InvalidStateError(const std::string& what) : Error("invalid state: " + what) {}
};

/// Out-of-range construction parameter (N, k, lambda, weights, ...).
class ParameterError : public Error {
public:
  explicit ParameterError(const std::string& what) : Error("parameter error: " + what) {}
};

/// Two objects that must share a layout do not.
class LayoutMismatchError : public Error {
public:
  explicit LayoutMismatchError(const std::string& what) : Error("layout mismatch: " + what) {}
};

/// The operation is not defined for layouts containing single-output boxes.
class UnsupportedLayoutError : public Error {
public:
  explicit UnsupportedLayoutError(const std::string& what) : Error("unsupported layout: " + what) {}
};

/// An enumeration or problem size exceeded its configured budget.
class ResourceError : public Error {
public:
  explicit ResourceError(const std::string& what) : Error("budget exceeded: " + what) {}
};

/// A vector lies outside the bipartite entropy cone.
class ConeError : public Error {
public:
  explicit ConeError(const std::string& what) : Error("cone error: " + what) {}
};

/// Malformed serialized input.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

}  // namespace boxworld
