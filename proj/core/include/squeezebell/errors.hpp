#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace squeezebell {

/// Base for every numerical-domain failure raised by the library.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument sits on a pole of the function (e.g. arctan at ±i).
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An intermediate scaling factor left the representable range.
class OverflowError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A denominator vanished (squeezing coefficients, large-squeezing 𝒳).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// One or more convergence inequalities failed; `failed()` names them.
class ConvergenceError : public DomainError {
public:
    ConvergenceError(const std::string& what, std::vector<std::string> failed)
        : DomainError(what), failed_(std::move(failed)) {}

    const std::vector<std::string>& failed() const noexcept { return failed_; }

private:
    std::vector<std::string> failed_;
};

/// det M vanishes relative to the d_i scale; carries |f_M|.
class DegenerateKernelError : public DomainError {
public:
    DegenerateKernelError(const std::string& what, double abs_det)
        : DomainError(what), abs_det_(abs_det) {}

    double abs_det() const noexcept { return abs_det_; }

private:
    double abs_det_;
};

/// A truncation or cell budget was exhausted before convergence.
class BudgetError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace squeezebell
