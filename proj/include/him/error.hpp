#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace him {

// Base class for every error raised by the library. Specific subclasses
// carry the offending indices where they are meaningful.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

// A location/scale estimate collapsed to zero (constant column, zero MAD,
// or a degenerate leave-one-out subsample).
class DegenerateScale : public Error {
public:
    explicit DegenerateScale(const std::string& msg,
                             std::ptrdiff_t row = -1,
                             std::ptrdiff_t column = -1)
        : Error(msg), row_(row), column_(column) {}
    std::ptrdiff_t row() const { return row_; }
    std::ptrdiff_t column() const { return column_; }

private:
    std::ptrdiff_t row_;
    std::ptrdiff_t column_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularDesign : public Error {
public:
    explicit SingularDesign(const std::string& msg, std::ptrdiff_t row = -1)
        : Error(msg), row_(row) {}
    std::ptrdiff_t row() const { return row_; }

private:
    std::ptrdiff_t row_;
};

class ExactLeverage : public Error {
public:
    explicit ExactLeverage(const std::string& msg, std::size_t row)
        : Error(msg), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

class DegenerateFit : public Error {
public:
    using Error::Error;
};

class DegenerateResponse : public Error {
public:
    using Error::Error;
};

class FitFailure : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    explicit ConvergenceFailure(const std::string& msg, std::size_t iterations)
        : Error(msg), iterations_(iterations) {}
    std::size_t iterations() const { return iterations_; }

private:
    std::size_t iterations_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg,
                        std::size_t line = 0,
                        std::ptrdiff_t column = -1)
        : Error(msg), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::ptrdiff_t column() const { return column_; }

private:
    std::size_t line_;
    std::ptrdiff_t column_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace him
