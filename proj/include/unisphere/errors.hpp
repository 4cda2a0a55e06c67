#pragma once

#include <stdexcept>
#include <string>

namespace unisphere {

/// A norm description that violates the norm axioms or its variant's invariants.
class InvalidNorm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two section vectors that do not span a plane.
class DegenerateSection : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside an operation's domain (zero vector, off-sphere point, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller-side contract violation that is not about a single argument value.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed norm JSON; path is a JSON pointer to the offending node.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& reason)
      : std::runtime_error(path.empty() ? reason : path + ": " + reason), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace unisphere
