#pragma once

#include <stdexcept>
#include <string>

namespace fuzzyclust {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for unreadable files and malformed edge-list input.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for invalid arguments, configs, and data that fails validation.
class InvalidInput : public std::runtime_error {
public:
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fuzzyclust
