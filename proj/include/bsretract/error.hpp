#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bsretract {

enum class ErrorCode {
    InvalidGroup,
    InvalidArgument,
    SingularMatrix,
    NotPositiveDefinite,
    NoConvergence,
    NotARootOfUnity,
    NotAUnit,
    InvalidOrbit,
    GroupMismatch,
    NoOrbitFits,
    NotSpecialLinear,
    NotFiniteOrder,
    DegenerateGroup,
    NotNormalizing,
    PolarObstruction,
    InvalidInput,
    ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace bsretract
