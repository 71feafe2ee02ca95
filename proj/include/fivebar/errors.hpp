#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fivebar {

// Base class for every failure the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (bad JSON, violated invariants).
class InputError : public Error {
public:
    using Error::Error;
};

// The desired point coincides with the tip of the CV crank.
class DegenerateTarget : public Error {
public:
    using Error::Error;
};

// Effector on the servo ground with r == s: infinitely many closures.
class DegenerateDyad : public Error {
public:
    using Error::Error;
};

class ProfileTooShort : public Error {
public:
    using Error::Error;
};

class HarmonicOverflow : public Error {
public:
    using Error::Error;
};

class ImmobileTrace : public Error {
public:
    using Error::Error;
};

class InfeasiblePopulation : public Error {
public:
    using Error::Error;
};

class UnstableSimulation : public Error {
public:
    UnstableSimulation(const std::string& what, std::size_t sample)
        : Error(what), sample_(sample) {}

    std::size_t sample() const noexcept { return sample_; }

private:
    std::size_t sample_;
};

}  // namespace fivebar
