// SPDX-License-Identifier: Apache-2.0
#include "lcsx/error.hpp"

namespace lcsx {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyHeading: return "EmptyHeading";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::EmptyQuery: return "EmptyQuery";
    case ErrorKind::BadRequest: return "BadRequest";
    case ErrorKind::Bundle: return "BundleError";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

}  // namespace lcsx
