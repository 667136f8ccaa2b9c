#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fracvar {

enum class ErrorKind {
    InvalidParam,
    NonConvergent,
    DomainError,
    SingularOrder,
    QuadratureFailure,
    DegenerateGrid,
    NewtonDivergence,
    HypothesisViolation,
    BoundViolation,
    DegenerateCase,
    NoInteriorMax,
    SyntaxError,
    UnknownIdentifier,
    DisallowedVariable,
    DomainFault,
    UnboundVariable,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `location` carries a grid node index
/// (solver and bound errors) or a byte offset (expression errors) when one
/// is meaningful.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what,
          std::optional<std::size_t> location = std::nullopt);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<std::size_t> location() const noexcept { return location_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> location_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what,
                       std::optional<std::size_t> location = std::nullopt);

}  // namespace fracvar
