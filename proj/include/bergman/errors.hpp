#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (a point off the cone, a minor index out of range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Complex power requested on the closed negative real axis.
class BranchCutError : public Error {
public:
    using Error::Error;
};

/// Quadrature could not reach its tolerance inside the node budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class CalibrationFailed : public Error {
public:
    using Error::Error;
};

class NonPositiveValue : public Error {
public:
    using Error::Error;
};

/// Projection range formula has a vanishing denominator (n/r = 1).
class RankOneDegenerate : public Error {
public:
    using Error::Error;
};

class IllConditioned : public Error {
public:
    using Error::Error;
};

class HypothesisFailed : public Error {
public:
    using Error::Error;
};

/// Bad suite configuration; carries a field path and (when known) a line.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace bergman
