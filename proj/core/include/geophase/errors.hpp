#pragma once

#include <stdexcept>
#include <string>

namespace geophase {

// Argument outside the documented domain (angles, strengths, mismatched configs).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A Kraus operator mapped the state to (numerically) zero.
class AnnihilationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two neighbouring valid samples differ by exactly pi; the branch cannot be
// chosen without a finer grid.
class UnwrapAmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoTransitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Beam term count exceeded the configured cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration or input file. what() carries every diagnostic,
// one per line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file that cannot be opened.
class FileNotFoundError : public std::runtime_error {
 public:
  explicit FileNotFoundError(const std::string& path)
      : std::runtime_error("cannot open file: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace geophase
