#pragma once
#include <stdexcept>
#include <string>

namespace colucb {

/// Error taxonomy mirrored by the C API codes and the CLI exit codes:
///   InvalidArgument -> 1 (usage / bad parameter)
///   DataError       -> 2 (missing file, schema violation, domain-invalid input)
///   InternalError   -> 3 (violated internal invariant, numerical breakdown)
struct InvalidArgument : std::runtime_error {
    explicit InvalidArgument(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace colucb
