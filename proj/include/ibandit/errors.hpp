#pragma once

#include <stdexcept>
#include <string>

namespace ibandit {

// Base for all library errors so callers can catch one type at the CLI boundary.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NegativeEntryError : Error {
    using Error::Error;
};
struct SumNotOneError : Error {
    using Error::Error;
};
struct WrongLengthError : Error {
    using Error::Error;
};
struct AssumptionViolatedError : Error {
    using Error::Error;
};
struct DegeneratePriorError : Error {
    using Error::Error;
};
struct InsufficientSamplesError : Error {
    using Error::Error;
};
struct ZeroPropensityError : Error {
    using Error::Error;
};
struct VariantMismatchError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct SchemaError : Error {
    using Error::Error;
};
struct EmptyClusterMeansError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace ibandit
