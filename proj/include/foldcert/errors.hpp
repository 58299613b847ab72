#pragma once

#include <stdexcept>
#include <string>

namespace foldcert {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input / parsing
struct MalformedInput : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct OutOfRangeLambda : Error { using Error::Error; };

// Sign certification
struct NoSamplesOnFace : Error { using Error::Error; };

// Block construction
struct NotABlock : Error { using Error::Error; };
struct BadInterface : Error { using Error::Error; };
struct NotASubcomplex : Error { using Error::Error; };

// Cerf graphics
struct OutOfChart : Error { using Error::Error; };
struct Unclassifiable : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };

// Synthesis
struct DecreaseFailed : Error { using Error::Error; };
struct OverlappingCutoffs : Error { using Error::Error; };
struct InconsistentGraphic : Error { using Error::Error; };
struct StageMismatch : Error { using Error::Error; };

// Verification
struct NonFiniteValue : Error { using Error::Error; };
struct LostBranch : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };

// CLI / artifacts
struct MissingArtifact : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };

}  // namespace foldcert
