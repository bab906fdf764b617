#pragma once

#include <stdexcept>
#include <string>

namespace cocorl {

// Base for all library failures. Callers that only care about "something went
// wrong in the numerics or generators" can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iteration caps exceeded, a decomposition failed to converge, or a hull
// construction broke down.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// A CMDP (or any LP built on top of one) admits no feasible solution.
class Infeasible : public Error {
public:
    using Error::Error;
};

// Enumeration-based routines refuse to start when the work would exceed the
// configured budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

// Rejection sampling or MCMC inside an environment/demo generator gave up.
class GenerationFailure : public Error {
public:
    using Error::Error;
};

// A closed-form bound is not representable (the denominator underflows).
class OverflowGuard : public Error {
public:
    using Error::Error;
};

// Malformed arguments at an API boundary.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace cocorl
