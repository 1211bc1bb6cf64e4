#pragma once

#include <stdexcept>
#include <string>

namespace msgl {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Tensor/operand dimensions do not line up.
struct ShapeError : Error {
    explicit ShapeError(const std::string& what) : Error(what) {}
};

/// An API precondition was violated by the caller.
struct ContractError : Error {
    explicit ContractError(const std::string& what) : Error(what) {}
};

/// Bad configuration file or inconsistent option combination.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// File I/O or format failure.
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace msgl
