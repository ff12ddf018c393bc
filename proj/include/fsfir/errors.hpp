#pragma once

#include <stdexcept>
#include <string>

namespace fsfir {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct IncompatibleGrids : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

struct UnsupportedResponse : Error {
    using Error::Error;
};

struct TooManySlices : Error {
    using Error::Error;
};

struct IllConditionedKernel : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

struct EmptyDataset : Error {
    using Error::Error;
};

}  // namespace fsfir
