#ifndef OPENMAP_ERRORS_HPP
#define OPENMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace openmap {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg = "dimension mismatch") : Error(msg) {}
};

struct ArityMismatch : Error {
    explicit ArityMismatch(const std::string& msg = "arity mismatch") : Error(msg) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& msg = "division by zero") : Error(msg) {}
};

// A quotient denominator interval straddles 0: the enclosure would be unbounded.
struct DomainBreach : Error {
    explicit DomainBreach(const std::string& msg = "denominator interval contains 0") : Error(msg) {}
};

struct NotCertified : Error {
    explicit NotCertified(const std::string& msg = "certification failed") : Error(msg) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg = "budget exceeded") : Error(msg) {}
};

struct LimitsExceeded : Error {
    explicit LimitsExceeded(const std::string& msg = "problem exceeds configured limits") : Error(msg) {}
};

struct UnsupportedMethod : Error {
    explicit UnsupportedMethod(const std::string& msg = "method not applicable") : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

} // namespace openmap

#endif
