#ifndef CATTAB_ERRORS_HPP
#define CATTAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cattab {

/// A value outside the mathematical domain of an operation (zero margin,
/// invalid probability, y > n, ...). Maps to CLI exit code 3.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input (unparseable CSV, bad flag value). Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cattab

#endif  // CATTAB_ERRORS_HPP
