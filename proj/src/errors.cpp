#include "fracvar/errors.hpp"

namespace fracvar {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParam: return "InvalidParam";
        case ErrorKind::NonConvergent: return "NonConvergent";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::SingularOrder: return "SingularOrder";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::DegenerateGrid: return "DegenerateGrid";
        case ErrorKind::NewtonDivergence: return "NewtonDivergence";
        case ErrorKind::HypothesisViolation: return "HypothesisViolation";
        case ErrorKind::BoundViolation: return "BoundViolation";
        case ErrorKind::DegenerateCase: return "DegenerateCase";
        case ErrorKind::NoInteriorMax: return "NoInteriorMax";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorKind::DisallowedVariable: return "DisallowedVariable";
        case ErrorKind::DomainFault: return "DomainFault";
        case ErrorKind::UnboundVariable: return "UnboundVariable";
    }
    return "Unknown";
}

namespace {
std::string decorate(ErrorKind kind, const std::string& what) {
    std::string out(to_string(kind));
    out += ": ";
    out += what;
    return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> location)
    : std::runtime_error(decorate(kind, what)), kind_(kind), location_(location) {}

void fail(ErrorKind kind, const std::string& what, std::optional<std::size_t> location) {
    throw Error(kind, what, location);
}

}  // namespace fracvar
