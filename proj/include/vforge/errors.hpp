#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vforge {

/// Base of every error the toolkit raises. `kind()` is the stable,
/// machine-readable name that the CLI prints in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Errors tied to a line of an input file (1-based).
class RecordError : public Error {
 public:
  RecordError(std::string kind, std::size_t line, const std::string& reason)
      : Error(std::move(kind), "line " + std::to_string(line) + ": " + reason), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MalformedRecord : public RecordError {
 public:
  MalformedRecord(std::size_t line, const std::string& reason)
      : RecordError("MalformedRecord", line, reason) {}
};

class UnknownLabel : public RecordError {
 public:
  UnknownLabel(std::size_t line, const std::string& label)
      : RecordError("UnknownLabel", line, "unknown label '" + label + "'"), label_(label) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class NonTreeParse : public RecordError {
 public:
  NonTreeParse(std::size_t line, const std::string& reason)
      : RecordError("NonTreeParse", line, reason) {}
};

class InvalidLabelSet : public Error {
 public:
  explicit InvalidLabelSet(const std::string& message) : Error("InvalidLabelSet", message) {}
};

class EmptyPool : public Error {
 public:
  explicit EmptyPool(const std::string& label)
      : Error("EmptyPool", "no candidates of the required length for label '" + label + "'"),
        label_(label) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class EmptyRelationPool : public Error {
 public:
  explicit EmptyRelationPool(const std::string& label)
      : Error("EmptyRelationPool", "relation '" + label + "' has no examples to sample from"),
        label_(label) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("DimensionMismatch", "expected dimension " + std::to_string(expected) + ", got " +
                                       std::to_string(actual)) {}
  explicit DimensionMismatch(const std::string& message) : Error("DimensionMismatch", message) {}
};

class ProviderUnavailable : public Error {
 public:
  explicit ProviderUnavailable(const std::string& message) : Error("ProviderUnavailable", message) {}
};

class IdMismatch : public Error {
 public:
  explicit IdMismatch(const std::string& message) : Error("IdMismatch", message) {}
};

class MissingArtifact : public Error {
 public:
  explicit MissingArtifact(const std::string& path)
      : Error("MissingArtifact", "required artifact not found: " + path) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& message) : Error("InvalidConfig", message) {}
};

}  // namespace vforge
