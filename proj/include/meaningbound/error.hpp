#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meaningbound {

enum class ErrorKind {
    ZeroDenominator,
    InconsistentCounts,
    Overflow,
    InvalidArgument,
    InvalidQuery,
    DuplicateDocId,
    MissingFixtureEntry,
    TransportFailure,
    MalformedResponse,
    StorageFailure,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace meaningbound
