#pragma once
#include <stdexcept>
#include <string>

namespace deconv {

// Error categories map 1:1 onto process exit codes and C API status values:
// config = 2, numeric = 3, io = 4.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace deconv
