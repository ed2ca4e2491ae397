#pragma once

#include <stdexcept>
#include <string>

namespace moran {

// Precondition violated by a caller (absorbing state, out-of-range parameter, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Topology or layout that cannot host the requested update rule.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical guard tripped (underflow of all posterior mass, boundary maximizer, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed event log, config or descriptor.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace moran
