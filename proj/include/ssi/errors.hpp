/*
 * Copyright 2026 The SSI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef SSI_ERRORS_HPP
#define SSI_ERRORS_HPP

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ssi {

/// Compact scientific formatting for diagnostics.
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

/// Violated precondition on shapes or arguments (dimension mismatch, bad option values).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Base for failures of numerical procedures (factorizations, implicit solves).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// SPD factorization failed; `pivot` is the first column with a non-positive pivot.
class FactorizationError : public NumericalError {
public:
    FactorizationError(const std::string& what, std::ptrdiff_t pivot, double sigma)
        : NumericalError(what), pivot_(pivot), sigma_(sigma) {}
    std::ptrdiff_t pivot() const noexcept { return pivot_; }
    double sigma() const noexcept { return sigma_; }

private:
    std::ptrdiff_t pivot_;
    double sigma_;
};

/// Implicit step did not reach the residual tolerance.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// A trajectory step failed; carries the index of the step that was being taken.
class StepError : public NumericalError {
public:
    StepError(const std::string& what, std::size_t step)
        : NumericalError(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Line and column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        return what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
    }
    std::size_t line_;
    std::size_t column_;
};

} // namespace ssi

#endif // SSI_ERRORS_HPP
