#pragma once

#include <stdexcept>
#include <string>

namespace eagle {

// Exit-code mapping in the CLI: ConfigError -> 2, DataError -> 3,
// TrainingError -> 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct SchemaError : DataError {
  explicit SchemaError(const std::string& what) : DataError(what) {}
};

struct TrainingError : std::runtime_error {
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eagle
