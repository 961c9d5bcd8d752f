#pragma once

#include <stdexcept>
#include <string>

namespace aobasis {

// Base of every exception thrown by the library. The CLI maps the
// concrete type onto an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Eigensolver non-convergence, failed line searches and similar.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// Reduced overlap matrix too ill-conditioned (or not positive definite).
class OvercompletenessFailure : public NumericalFailure {
public:
    OvercompletenessFailure(const std::string& what, double condition)
        : NumericalFailure(what), condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// Second and third Ritz values of the reduced problem are not separated.
class DegenerateGapFailure : public NumericalFailure {
public:
    DegenerateGapFailure(const std::string& what, double gap)
        : NumericalFailure(what), gap_(gap) {}

    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

class RetractionFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

}  // namespace aobasis
