#include "sere/error.hpp"

namespace sere {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::StabilityViolation: return "StabilityViolation";
        case Errc::NonPositiveParameter: return "NonPositiveParameter";
        case Errc::InsufficientSamples: return "InsufficientSamples";
        case Errc::NotStochastic: return "NotStochastic";
        case Errc::NotErgodic: return "NotErgodic";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::OutOfHorizon: return "OutOfHorizon";
        case Errc::InvalidMark: return "InvalidMark";
        case Errc::InvalidState: return "InvalidState";
        case Errc::HorizonTooShort: return "HorizonTooShort";
        case Errc::BalanceViolated: return "BalanceViolated";
        case Errc::NegativeVariance: return "NegativeVariance";
        case Errc::Overflow: return "Overflow";
        case Errc::EventCapExceeded: return "EventCapExceeded";
        case Errc::ConfigError: return "ConfigError";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace sere
