#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace richstate {

enum class ErrorKind {
    invalid_reference,
    stale_action,
    configuration,
    workflow,
    already_claimed,
    unclaimable,
    invalid_use,
    forbidden,
    validation,
    no_primary,
    identity,
    infeasible,
    undefined_increase,
    exhausted,
    io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for every domain failure; `kind()` drives exit codes
/// in the CLI and status codes in the universe service.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace richstate
