#pragma once

#include <stdexcept>
#include <string>

namespace graphuq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteValue : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyGraph : Error { using Error::Error; };
struct EigenFailure : Error { using Error::Error; };
struct Diverged : Error { using Error::Error; };
struct DegenerateChannel : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct DisconnectedGraph : Error { using Error::Error; };
struct DegenerateTessellation : Error { using Error::Error; };
struct SingularAtAxis : Error { using Error::Error; };
struct LayoutMismatch : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace graphuq
