#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bikeqn {

// Coarse error classes; these map 1:1 onto the C API status codes and the
// CLI exit codes.
enum class ErrorClass {
    schema = 1,          // malformed config document
    model = 2,           // model invariant violation
    reducible = 3,       // path graph / routing matrix not irreducible
    no_convergence = 4,  // fixed point did not converge
    state_space = 5,     // state space exceeds the configured cap
    bad_argument = 6,
    internal = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string message)
        : std::runtime_error(std::move(message)), cls_(cls) {}

    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

// One validation violation. `code` is a stable machine-readable tag
// (capacity, routing, degenerate_station, rate, map, schema), `where`
// names the offending station/road/key.
struct Finding {
    std::string code;
    std::string where;
    std::string message;
};

class ValidationError : public Error {
public:
    ValidationError(ErrorClass cls, std::vector<Finding> findings, std::string summary)
        : Error(cls, std::move(summary)), findings_(std::move(findings)) {}

    const std::vector<Finding>& findings() const noexcept { return findings_; }

private:
    std::vector<Finding> findings_;
};

class SchemaError : public Error {
public:
    explicit SchemaError(std::string message)
        : Error(ErrorClass::schema, std::move(message)) {}
};

class SingularGenerator : public Error {
public:
    explicit SingularGenerator(std::string message)
        : Error(ErrorClass::model, std::move(message)) {}
};

class ZeroPhaseRate : public Error {
public:
    explicit ZeroPhaseRate(std::string message)
        : Error(ErrorClass::model, std::move(message)) {}
};

class ReducibleMatrix : public Error {
public:
    explicit ReducibleMatrix(std::string message)
        : Error(ErrorClass::reducible, std::move(message)) {}
};

class StateSpaceTooLarge : public Error {
public:
    StateSpaceTooLarge(std::string message, unsigned long long count, unsigned long long cap)
        : Error(ErrorClass::state_space, std::move(message)), count_(count), cap_(cap) {}

    unsigned long long count() const noexcept { return count_; }
    unsigned long long cap() const noexcept { return cap_; }

private:
    unsigned long long count_;
    unsigned long long cap_;
};

class DimensionError : public Error {
public:
    explicit DimensionError(std::string message)
        : Error(ErrorClass::bad_argument, std::move(message)) {}
};

class UnknownRoad : public Error {
public:
    explicit UnknownRoad(std::string message)
        : Error(ErrorClass::bad_argument, std::move(message)) {}
};

}  // namespace bikeqn
