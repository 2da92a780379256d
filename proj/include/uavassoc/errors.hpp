#pragma once

#include <stdexcept>
#include <string>

namespace uavassoc {

/// A parameter lies outside the domain the model is defined on.
class InvalidConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A realized scenario cannot serve the request (e.g. fewer BSs than
/// candidates). Callers regenerate with a derived sub-seed.
class ScenarioRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed model or dataset file. `field()` names the offending entry.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class UnsupportedVersion : public ParseError {
 public:
  explicit UnsupportedVersion(int found)
      : ParseError("version", "unsupported model file version " + std::to_string(found)),
        found_(found) {}
  int found() const noexcept { return found_; }

 private:
  int found_;
};

/// A file the operation depends on (model, dataset) does not exist.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uavassoc
