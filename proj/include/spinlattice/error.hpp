#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinlattice {

enum class ErrorCode {
    InvalidSpec,
    DimensionMismatch,
    IndexOutOfRange,
    WrongLatticeKind,
    NonPositiveTemperature,
    NonPositiveCoupling,
    SingularCoupling,
    FieldNotSupported,
    InvalidTolerance,
    TooLarge,
    ParseError,
    ValidationError,
    IoError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::WrongLatticeKind: return "WrongLatticeKind";
        case ErrorCode::NonPositiveTemperature: return "NonPositiveTemperature";
        case ErrorCode::NonPositiveCoupling: return "NonPositiveCoupling";
        case ErrorCode::SingularCoupling: return "SingularCoupling";
        case ErrorCode::FieldNotSupported: return "FieldNotSupported";
        case ErrorCode::InvalidTolerance: return "InvalidTolerance";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

inline void require_positive_temperature(double temp) {
    if (!(temp > 0.0)) {
        throw Error(ErrorCode::NonPositiveTemperature, "temperature must be > 0, got " + std::to_string(temp));
    }
}

}  // namespace detail

}  // namespace spinlattice
