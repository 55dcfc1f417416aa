#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sere {

enum class Errc {
    StabilityViolation,
    NonPositiveParameter,
    InsufficientSamples,
    NotStochastic,
    NotErgodic,
    SingularSystem,
    OutOfHorizon,
    InvalidMark,
    InvalidState,
    HorizonTooShort,
    BalanceViolated,
    NegativeVariance,
    Overflow,
    EventCapExceeded,
    ConfigError,
    IoError,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

    /// True for errors caused by invalid user input rather than by a failed run.
    bool is_input_error() const noexcept {
        return code_ != Errc::IoError && code_ != Errc::Overflow && code_ != Errc::EventCapExceeded &&
               code_ != Errc::SingularSystem;
    }

private:
    Errc code_;
};

}  // namespace sere
