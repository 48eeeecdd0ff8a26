#pragma once

#include <stdexcept>
#include <string>

namespace ckn {

// Base for every error raised by the toolkit. Campaign drivers catch this
// type and turn it into a diagnostic row instead of aborting the run.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Adaptive refinement hit its panel or depth cap before the tolerance.
class AccuracyNotReached : public Error {
public:
    using Error::Error;
};

class NonFiniteIntegrand : public Error {
public:
    using Error::Error;
};

// A functional that divides by (or normalizes with) ||u|| was handed u = 0.
class ZeroFunction : public Error {
public:
    using Error::Error;
};

class HypothesisViolation : public Error {
public:
    using Error::Error;
};

// Every corpus member was filtered out as numerically indistinguishable
// from an extremal.
class AllExcluded : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace ckn
