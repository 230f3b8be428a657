#pragma once

#include <stdexcept>
#include <string>

namespace compsim {

// Errors map onto the CLI exit-code contract: data errors exit 2,
// backend/provider errors exit 3.

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad inputs: malformed files, invariant violations, unknown names.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

// A key (term, pair, backend name) that is not present where it must be.
class LookupError : public DataError {
 public:
  explicit LookupError(const std::string& what) : DataError(what) {}
};

// A compressor backend failed (bad subprocess, stream error).
class BackendError : public Error {
 public:
  BackendError(const std::string& backend, const std::string& what)
      : Error("backend '" + backend + "': " + what), backend_(backend) {}
  const std::string& backend() const { return backend_; }

 private:
  std::string backend_;
};

// A count provider failed (network, parse, rate limit).
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what) : Error(what) {}
};

}  // namespace compsim
