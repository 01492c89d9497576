#pragma once

#include <stdexcept>
#include <string>

namespace alphamod {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition or malformed configuration.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// An iterative or adaptive method missed its target; carries what it reached.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace alphamod
