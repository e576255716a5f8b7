#pragma once

#include <stdexcept>
#include <string>

namespace catsize {

/// Invalid numeric parameter (negative truncation, equal hop indices, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Occupation configuration not present in a basis.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Precondition violated by the caller (unnormalized state, non-hermitian input).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Two objects that must share a basis do not.
class BasisMismatchError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Target state has weight outside every space reachable from the source.
class UnreachableTargetError : public std::runtime_error {
public:
    UnreachableTargetError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The current operator does not split the two lowest levels.
class DegenerateCurrentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A current-sign projection of the ground state carries too little weight.
class InsufficientWeightError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown that indicates a bug or a badly chosen tolerance.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace catsize
