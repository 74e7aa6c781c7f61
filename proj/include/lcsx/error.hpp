// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lcsx {

enum class ErrorKind {
  EmptyHeading,
  Parse,
  Schema,
  DuplicateId,
  MalformedRecord,
  UnsupportedEncoding,
  NotFound,
  InvalidPath,
  EmptyQuery,
  BadRequest,
  Bundle,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every domain failure in the library is reported as an Error. `location` is
// kind-dependent: a 1-based line for JSONL errors, a byte offset for
// MalformedRecord, a 1-based record ordinal for ISO 2709 schema errors, and
// the index of the first bad step for InvalidPath.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> location = std::nullopt)
      : std::runtime_error(message), kind_(kind), location_(location) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> location_;
};

}  // namespace lcsx
