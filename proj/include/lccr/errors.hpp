#pragma once

#include <stdexcept>
#include <string>

namespace lccr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// field / matrix layer
struct ZeroInverse : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct BadSupport : Error { using Error::Error; };

// codec layer
struct InsufficientBlocks : Error { using Error::Error; };
struct InconsistentBlocks : Error { using Error::Error; };
struct CapabilityMissing : Error { using Error::Error; };
struct WrongHelperCount : Error { using Error::Error; };
struct Unrecoverable : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };

// repair layer
struct InsufficientHelpers : Error { using Error::Error; };
struct NeighborUnavailable : Error { using Error::Error; };
struct HelperGroupDown : Error { using Error::Error; };
struct PlanInvalid : Error { using Error::Error; };
struct MultipleGroupFailures : Error { using Error::Error; };

// harness layer
struct ScenarioInvalid : Error { using Error::Error; };
struct ChecksumMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace lccr
