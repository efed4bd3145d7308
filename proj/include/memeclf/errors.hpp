#ifndef MEMECLF_ERRORS_HPP
#define MEMECLF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace memeclf {

// Process exit codes / C API status codes. Keep in sync with memeclf.h.
enum class ErrorCode : int {
    ok = 0,
    internal = 1,
    config = 2,
    data = 3,
    alignment = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Bad configuration value, missing config key, unusable command line.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

// Malformed or inconsistent input data (corpus files, images, checkpoints).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCode::data, what) {}
};

// Row-alignment mismatch between prediction/label files.
class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& what) : Error(ErrorCode::alignment, what) {}
};

// Contract violation on an operation argument (bad k, width mismatch, ...).
// Maps to the config exit code: these surface from user-supplied values.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorCode::config, what) {}
};

} // namespace memeclf

#endif
