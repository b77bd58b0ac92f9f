#pragma once
#include <stdexcept>
#include <string>

namespace difs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// geometry / construction
struct InvalidSpec : Error { using Error::Error; };
struct ZeroSpan : Error { using Error::Error; };
struct DegenerateSegment : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };

// raster / loss
struct EmptySegmentList : Error { using Error::Error; };
struct TooFewSegments : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct ViewportTooSmall : Error { using Error::Error; };

// optimizer / diff / cli
struct UnknownPreset : Error { using Error::Error; };
struct NonFiniteGradient : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace difs
