// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ethdec {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution violates its invariants: empty, duplicate labels,
/// negative quantities, or no positive quantity at all.
class InvalidDistributionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A requested (date, metric) record does not exist in the store.
class MissingDataError : public Error {
 public:
  using Error::Error;
};

/// Fewer stored days than the computation needs.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// max(beta) == min(beta): the master-index denominator vanishes.
class DegenerateRangeError : public Error {
 public:
  using Error::Error;
};

/// Appending a (date, metric) record that already exists without the
/// overwrite flag.
class DuplicateSnapshotError : public Error {
 public:
  using Error::Error;
};

/// Fixture-mode fetch found no payload file.
class FixtureMissingError : public Error {
 public:
  using Error::Error;
};

/// Live fetch failed after all retry attempts; the message carries the
/// per-attempt trace.
class SourceUnavailableError : public Error {
 public:
  using Error::Error;
};

/// Payload is not syntactically valid; carries source id and byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& source_id, std::size_t byte_offset,
             const std::string& what)
      : Error(source_id + ": parse error at byte " +
              std::to_string(byte_offset) + ": " + what),
        source_id_(source_id),
        byte_offset_(byte_offset) {}

  const std::string& source_id() const { return source_id_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::string source_id_;
  std::size_t byte_offset_;
};

/// Payload parsed but does not have the expected shape (missing or
/// wrongly typed field).
class SchemaMismatchError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ethdec
