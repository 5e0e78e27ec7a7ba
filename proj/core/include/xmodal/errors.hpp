#pragma once

#include <stdexcept>
#include <string>

namespace xmodal {

// Base class for every failure the library reports. Each concrete type
// corresponds to one contract violation, so callers (and tests) can catch
// precisely the condition they care about.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- vector / matrix primitives
struct ZeroNormError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct ShapeMismatchError : Error { using Error::Error; };
struct NonPositiveTemperatureError : Error { using Error::Error; };
struct NonSquareError : Error { using Error::Error; };

// -- encoders and model parameters
struct EmptyTokenListError : Error { using Error::Error; };
struct LengthMismatchError : Error { using Error::Error; };
struct StaleCacheError : Error { using Error::Error; };
struct InvalidDimsError : Error { using Error::Error; };

// -- losses
struct InvalidTargetsError : Error { using Error::Error; };

// -- curation
struct EmptyPoolError : Error { using Error::Error; };
struct EmptyDsCaptionSetError : Error { using Error::Error; };
struct InvalidProbabilityError : Error { using Error::Error; };

// -- zero-shot
struct BadTemplateError : Error { using Error::Error; };
struct EmptyEvalSetError : Error { using Error::Error; };

// -- training
struct InsufficientDataError : Error { using Error::Error; };
struct IncompatibleDimsError : Error { using Error::Error; };
struct NonFiniteGradientError : Error { using Error::Error; };
struct InvalidConfigError : Error { using Error::Error; };

// -- persistence
struct IoError : Error { using Error::Error; };
struct FormatVersionMismatchError : Error { using Error::Error; };
struct CorruptRecordError : Error { using Error::Error; };
struct InvalidSpecError : Error { using Error::Error; };

}  // namespace xmodal
