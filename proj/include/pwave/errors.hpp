#pragma once

#include <stdexcept>
#include <string>

namespace pwave {

enum class ErrorKind {
    invalid_argument,
    unsupported_degree,
    unsupported,
    solver_failure,
    numerical_breakdown,
    continuation_stalled,
    step_size_failure,
    ill_posed_boundary_data,
};

const char* to_string(ErrorKind kind);

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
    if (!condition) fail(ErrorKind::invalid_argument, what);
}

} // namespace pwave
