#pragma once

#include <stdexcept>
#include <string>

namespace lemon {

// Parameters outside an operation's admissible domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// A position angle that does not belong to the requested arc.
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

// The orbit touched a corner or became tangent where a smooth step was required.
class SingularityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NoReturn : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// F^{-1}x0 or F x2 is not a reflection on the small arc.
class ExtensionInvalid : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A finite-difference stencil point changed arcs or hit a singularity.
class ItineraryChange : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace lemon
