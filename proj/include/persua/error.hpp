#pragma once

#include <stdexcept>
#include <string>

namespace persua {

// A file could not be opened or written at all. Distinct from ParseError so
// "missing artifact" and "broken artifact" exit differently.
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file could not be parsed (bad JSON/CSV/date, unknown label, ...).
// `line` is 1-based when it refers to a file location, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Input violates a documented invariant (spend_lo > spend_hi, bad fraction, ...).
class ValidationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A statistic is undefined on this input (all-one-category agreement table,
// constant series fed to a correlation, ...). Distinct from ValidationError so
// callers can report "undefined" rather than "invalid".
class DegenerateInputError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace persua
