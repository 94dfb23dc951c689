#pragma once

#include <stdexcept>
#include <string>

namespace bew {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Byte stream is not decodable text (bad UTF-8, unsupported charset).
struct ParseError : Error {
  using Error::Error;
};

// A node_path does not resolve in the tree it claims to come from.
struct PathError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct EmptyTextError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct RemoteUnavailableError : Error {
  using Error::Error;
};

// No title immutables survive mining; caller decides whether to skip.
struct EmptyTemplateError : Error {
  using Error::Error;
};

struct NoTemplatesError : Error {
  using Error::Error;
};

struct NoEntityPagesError : Error {
  using Error::Error;
};

}  // namespace bew
