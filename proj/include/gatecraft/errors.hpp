#pragma once

#include <stdexcept>
#include <string>

namespace gatecraft {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input. The message starts with the offending field path when known.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    NumericError(const std::string& what, double achieved = 0.0)
        : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class LabelingError : public Error {
public:
    using Error::Error;
};

class UnsupportedSchedule : public Error {
public:
    using Error::Error;
};

// Conditional phase requested where the defining matrix elements vanish.
class UndefinedPhase : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gatecraft
