#pragma once

#include <stdexcept>
#include <string>

namespace htpq {

// Exit-code contract: invalid_argument (and ParseError) -> 2,
// InvariantViolation -> 1, CapExceeded -> 3.
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

} // namespace htpq
