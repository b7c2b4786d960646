#pragma once

#include <stdexcept>
#include <string>

namespace fixsim {

// Exit-code mapping used by the CLI: ConfigError -> 2, IoError -> 3,
// FormatError and subclasses -> 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// File does not start with the expected magic bytes.
struct BadMagicError : FormatError {
    explicit BadMagicError(const std::string& msg) : FormatError(msg) {}
};

// Magic matched but the format version is not supported.
struct BadVersionError : FormatError {
    explicit BadVersionError(const std::string& msg) : FormatError(msg) {}
};

// Truncated payload, out-of-range indices, or a header hash that does not
// match the file's own content.
struct CorruptFileError : FormatError {
    explicit CorruptFileError(const std::string& msg) : FormatError(msg) {}
};

// Cache file is internally consistent but was built for different parameters.
struct StaleCacheError : FormatError {
    explicit StaleCacheError(const std::string& msg) : FormatError(msg) {}
};

// Fixation ratio outside (0, 1].
struct InvalidRatioError : std::invalid_argument {
    explicit InvalidRatioError(const std::string& msg) : std::invalid_argument(msg) {}
};

// floor(ratio * n_patches) came out as zero patches.
struct EmptySelectionError : std::invalid_argument {
    explicit EmptySelectionError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace fixsim
