#pragma once

#include <stdexcept>
#include <string>

namespace sepnmf {

// Base class for everything thrown by this library. The three immediate
// subclasses map onto the CLI exit-code categories: InputError -> 2,
// IoError -> 3, SolverError -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InputError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public InputError {
public:
    using InputError::InputError;
};

class InvalidInputError : public InputError {
public:
    using InputError::InputError;
};

class NegativeValueError : public InputError {
public:
    using InputError::InputError;
    NegativeValueError(const std::string& msg, std::size_t line, std::size_t col)
        : InputError(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ")") {}
};

class DuplicateIdError : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t col)
        : InputError(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")"),
          line(line),
          col(col) {}
    std::size_t line;
    std::size_t col;
};

class MissingLabelError : public InputError {
public:
    using InputError::InputError;
};

class EmptyColumnError : public InputError {
public:
    explicit EmptyColumnError(const std::string& col_id)
        : InputError("column '" + col_id + "' has no observed entry"), col_id(col_id) {}
    std::string col_id;
};

class InvalidSpecError : public InputError {
public:
    using InputError::InputError;
};

class EmptyInputError : public InputError {
public:
    using InputError::InputError;
};

class BadBinCountError : public InputError {
public:
    using InputError::InputError;
};

class RankTooLargeError : public SolverError {
public:
    using SolverError::SolverError;
};

class ZeroVectorError : public SolverError {
public:
    using SolverError::SolverError;
};

class LengthOneError : public SolverError {
public:
    using SolverError::SolverError;
};

class ZeroNormError : public SolverError {
public:
    using SolverError::SolverError;
};

class BadSliceCountError : public SolverError {
public:
    using SolverError::SolverError;
};

class AllDiagonalsEmptyError : public SolverError {
public:
    using SolverError::SolverError;
};

class NoFeaturesSurviveError : public SolverError {
public:
    using SolverError::SolverError;
};

class DegenerateInputError : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace sepnmf
