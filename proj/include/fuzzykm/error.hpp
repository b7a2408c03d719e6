#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fuzzykm {

enum class ErrorKind {
    invalid_input,
    dimension_mismatch,
    out_of_range,
    degenerate,
    infeasible,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid_input";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::out_of_range: return "out_of_range";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::infeasible: return "infeasible";
    }
    return "unknown";
}

/// Structured failure raised by every operation in the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace detail
}  // namespace fuzzykm
