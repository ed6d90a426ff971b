#pragma once

#include <stdexcept>
#include <string>

namespace vat {

enum class ErrorKind {
    invalid_config,
    address_overflow,
    invalid_argument,
    policy_misuse,
    cache_too_small,
    tallness_violation,
    domain_error,
    trace_format,
    io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace vat
