#pragma once

#include <stdexcept>
#include <string>

namespace thinfree {

// Invalid arguments, malformed configs, broken preconditions. CLI exit code 2.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that was set up correctly but failed to produce a result
// (iteration caps, lost brackets, missing sign structure). CLI exit code 1.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class NotEquivalentToPucci : public NumericalError {
public:
    explicit NotEquivalentToPucci(const std::string& what) : NumericalError(what) {}
};

class NoSectorClosure : public NumericalError {
public:
    explicit NoSectorClosure(const std::string& what) : NumericalError(what) {}
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, long iterations, double residual)
        : NumericalError(what), iterations(iterations), residual(residual) {}
    long iterations;
    double residual;
};

class NoFreeBoundary : public NumericalError {
public:
    explicit NoFreeBoundary(const std::string& what) : NumericalError(what) {}
};

class MonotonicityViolated : public NumericalError {
public:
    explicit MonotonicityViolated(const std::string& what) : NumericalError(what) {}
};

class InsufficientScales : public NumericalError {
public:
    explicit InsufficientScales(const std::string& what) : NumericalError(what) {}
};

class DegenerateRegion : public NumericalError {
public:
    explicit DegenerateRegion(const std::string& what) : NumericalError(what) {}
};

} // namespace thinfree
