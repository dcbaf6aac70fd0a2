#ifndef STICKYGRAPH_ERRORS_HPP
#define STICKYGRAPH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sticky {

/// Malformed input document (bad syntax, wrong types, unknown keys).
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a model constraint.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Numerical failure: singular or ill-conditioned systems, step limits.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace sticky

#endif
