#pragma once

#include <stdexcept>
#include <string>

namespace desync {

enum class ErrorKind {
    invalid_argument,
    constraint_violation,
    ordering_violation,
    validation,
    solver,
    resource_limit,
    internal,
};

inline const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::constraint_violation: return "constraint violation";
    case ErrorKind::ordering_violation: return "ordering violation";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::solver: return "solver error";
    case ErrorKind::resource_limit: return "resource limit";
    case ErrorKind::internal: return "internal error";
    }
    return "error";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

}  // namespace desync
