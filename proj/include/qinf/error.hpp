#pragma once

#include <stdexcept>
#include <string>

namespace qinf {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold (bad interval, bad exponent, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed textual input (rationals, decimals, JSON documents, digit lists).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A search or refinement loop hit its iteration cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A point lies closer to a cylinder boundary than the enclosure width can resolve.
class BoundaryAmbiguity : public Error {
public:
    BoundaryAmbiguity(std::string lower_digit, std::string upper_digit)
        : Error("boundary ambiguity between digits " + lower_digit + " and " + upper_digit),
          lower_(std::move(lower_digit)), upper_(std::move(upper_digit)) {}

    const std::string& lower_digit() const { return lower_; }
    const std::string& upper_digit() const { return upper_; }

private:
    std::string lower_;
    std::string upper_;
};

/// No finite range at the chosen offset violates the tail inequality.
class NoViolation : public Error {
public:
    using Error::Error;
};

/// The volume budget L cannot be met within the index cap.
class BudgetInfeasible : public Error {
public:
    using Error::Error;
};

}  // namespace qinf
