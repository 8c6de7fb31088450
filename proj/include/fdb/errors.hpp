#pragma once

#include <stdexcept>
#include <string>

namespace fdb {

// Validation failures raise std::invalid_argument; these two distinguish
// numerical breakdowns and I/O failures for exit-code mapping.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdb
