#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace plap {

/// Base class of every error raised by the library. Nonexistence verdicts
/// (a outside the existence window) are *not* errors; they are reported in
/// the result types.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PLAP_DEFINE_ERROR(Name)                                    \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

PLAP_DEFINE_ERROR(InvalidDomain);
PLAP_DEFINE_ERROR(InvalidSubdomain);
PLAP_DEFINE_ERROR(NegativeCoefficient);
PLAP_DEFINE_ERROR(GridMismatch);
PLAP_DEFINE_ERROR(NegativeInput);
PLAP_DEFINE_ERROR(DegenerateJacobian);
PLAP_DEFINE_ERROR(BadExponent);
PLAP_DEFINE_ERROR(PreconditionError);
PLAP_DEFINE_ERROR(NoConvergence);
PLAP_DEFINE_ERROR(AlphaOutOfRange);
PLAP_DEFINE_ERROR(TooFewRecords);
PLAP_DEFINE_ERROR(CycleDetected);
PLAP_DEFINE_ERROR(InfeasibleWindow);
PLAP_DEFINE_ERROR(PlateauTooSmall);
PLAP_DEFINE_ERROR(UnknownKey);
PLAP_DEFINE_ERROR(RangeError);

#undef PLAP_DEFINE_ERROR

/// Six significant digits, for error messages.
inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Config syntax error carrying the 1-based offending line.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("ParseError: line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace plap
