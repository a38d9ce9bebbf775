#pragma once

#include <stdexcept>
#include <string>

namespace soco {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of the function it is evaluated on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mismatched lengths, domains or alignments between related objects.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive computation would exceed its enumeration budget.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A policy cannot take part in a protocol it was handed to.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; the message names the offending field.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace soco
