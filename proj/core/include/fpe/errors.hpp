#pragma once

#include <stdexcept>
#include <string>

namespace fpe {

/// Base class for all toolkit failures. Subclasses name the contract that broke.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidModelError : Error {
    std::string field;
    InvalidModelError(std::string field_, const std::string& what_)
        : Error("invalid model [" + field_ + "]: " + what_), field(std::move(field_)) {}
};

struct UnsupportedModelError : Error { using Error::Error; };
struct TailMassExceededError : Error { using Error::Error; };
struct SpectrumViolationError : Error { using Error::Error; };
struct ComplexPairUnsupportedError : Error { using Error::Error; };
struct QuadratureDivergenceError : Error { using Error::Error; };
struct StepUnstableError : Error { using Error::Error; };
struct MassAnomalyError : Error { using Error::Error; };
struct GridMismatchError : Error { using Error::Error; };
struct DegenerateDenominatorError : Error { using Error::Error; };
struct NoContractionError : Error { using Error::Error; };
struct HorizonTooShortError : Error { using Error::Error; };
struct FitUnavailableError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace fpe
