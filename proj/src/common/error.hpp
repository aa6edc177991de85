#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoagent {

enum class ErrorCode {
    invalid_argument,
    not_found,
    denied,
    io,
    sql,
    backend,
    validation,
    parse,
    replay_mismatch,
    exhausted,
    not_applicable,
    internal,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the core surface as geoagent::Error. The C API
// maps the code onto its status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace geoagent
