#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lamarck {

/// Argument outside an operation's domain (bad coordinate, empty input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A structural invariant was violated (cyclic genome, tree/genotype mismatch).
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Oscillator state became non-finite during integration.
class NumericalDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persisted data could not be decoded. `offset` is the byte offset of the
/// first unreadable record.
class CorruptionError : public std::runtime_error {
 public:
  CorruptionError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lamarck
