#pragma once

#include <stdexcept>

namespace vecoffload {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument violates an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Timestamps that cannot belong to one consistent schedule (e.g. start before arrival).
class ScenarioInconsistency : public Error {
 public:
  using Error::Error;
};

// Engine / experiment configuration is unusable.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A serialized document is malformed. The message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A bookkeeping invariant broke inside the engine. Always a bug.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace vecoffload
