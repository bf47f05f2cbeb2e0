#pragma once

#include <stdexcept>
#include <string>

namespace riemfpp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Query point lies outside the field/metric window.
struct OutOfWindowError : Error {
    using Error::Error;
};

/// Circulant embedding produced eigenvalues below the clip tolerance.
struct EmbeddingError : Error {
    using Error::Error;
};

/// Exact search or enumeration exceeded its configured resource guard.
struct ResourceLimitError : Error {
    using Error::Error;
};

/// The window cannot accommodate the requested query (padding / ball radius).
struct WindowTooSmallError : Error {
    using Error::Error;
};

}  // namespace riemfpp
