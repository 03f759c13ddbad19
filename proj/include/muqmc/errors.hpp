#pragma once

#include <stdexcept>
#include <string>

namespace muqmc {

// Base class for all library errors. Subtypes map onto CLI exit codes:
// parse/config -> 2, budget -> 3, invariant violation -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& msg) : Error(msg) {}
};

class ParityError : public Error {
public:
    explicit ParityError(const std::string& msg) : Error(msg) {}
};

class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& msg) : Error(msg) {}
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& msg) : Error(msg) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// Signals a broken internal guarantee (a bug), not a data condition.
class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& msg) : Error(msg) {}
};

class IncompleteTraceError : public Error {
public:
    explicit IncompleteTraceError(const std::string& msg) : Error(msg) {}
};

} // namespace muqmc
