#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flexq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

class InvalidIndex : public Error {
public:
    using Error::Error;
};

class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InstanceTooLarge : public Error {
public:
    InstanceTooLarge(const std::string& what, long double policy_count)
        : Error(what), policy_count_(policy_count) {}
    long double policy_count() const { return policy_count_; }

private:
    long double policy_count_;
};

/// Raised when an iterative method stops at its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace flexq
