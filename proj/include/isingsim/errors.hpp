#pragma once

#include <stdexcept>
#include <string>

namespace isingsim {

// Raised for malformed user input: bad dimensions, unreadable files,
// out-of-range options. Maps to process exit code 2 in the CLI.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computation cannot proceed numerically: singular
// information matrices, non-finite objectives, failed refits. Maps to
// process exit code 3 in the CLI.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isingsim
