// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinor {

/// Base of every error thrown by the library. `kind()` is a stable,
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& message)
        : Error("dimension_mismatch", message) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message)
        : Error("invalid_argument", message) {}
};

/// Graph violates the OrientedGraph invariants; `edge_index()` names the edge.
class InvalidGraph : public Error {
public:
    InvalidGraph(std::size_t edge_index, const std::string& message)
        : Error("invalid_graph", message), edge_index_(edge_index) {}

    std::size_t edge_index() const noexcept { return edge_index_; }

private:
    std::size_t edge_index_;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message)
        : Error("numerical_error", message) {}
};

/// Non-finite value produced by the learning solver.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t iteration, std::string variable)
        : Error("non_finite",
                "non-finite values in " + variable + " at iteration " + std::to_string(iteration)),
          iteration_(iteration), variable_(std::move(variable)) {}

    std::size_t iteration() const noexcept { return iteration_; }
    const std::string& variable() const noexcept { return variable_; }

private:
    std::size_t iteration_;
    std::string variable_;
};

/// Malformed input file; `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("parse_error", "line " + std::to_string(line) + ": " + message), line_(line), detail_(message) {}

    std::size_t line() const noexcept { return line_; }
    /// The message without the line prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io_error", message) {}
};

}  // namespace spinor
