#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tfac {

enum class ErrorKind {
    InvalidParameter,
    DomainError,
    LengthMismatch,
    SpecMismatch,
    ConstructionFailure,
    NewtonDivergence,
    Configuration,
    MissingHistory,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::SpecMismatch: return "spec-mismatch";
    case ErrorKind::ConstructionFailure: return "construction-failure";
    case ErrorKind::NewtonDivergence: return "newton-divergence";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::MissingHistory: return "missing-history";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

/// Library error carrying a stable, machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) {
        throw Error(kind, msg);
    }
}

}  // namespace tfac
