#pragma once

#include <stdexcept>
#include <string>

namespace qrocket {

// Invalid configuration (bad hyperparameter, unknown agent kind, ...).
// Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failure (unwritable output directory, missing input file).
// Mapped to exit code 3 by the CLI.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed artifact content (corrupt checkpoint, bad CSV row).
// Mapped to exit code 4 by the CLI.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrocket
