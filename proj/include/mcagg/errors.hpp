#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace mcagg {

/// Input or configuration problem the caller can fix (bad file, bad flag,
/// infeasible request). The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : InputError("parse error at row " + std::to_string(row) + ", column " +
                     std::to_string(column) + ": " + what),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class EmptyDataset : public InputError {
public:
    using InputError::InputError;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

class ShapeError : public InputError {
public:
    using InputError::InputError;
};

class DegenerateScale : public InputError {
public:
    using InputError::InputError;
};

/// A cannot-link that falls inside a must-link clique, or a pair listed as
/// both must-link and cannot-link.
class ContradictoryConstraints : public InputError {
public:
    explicit ContradictoryConstraints(const std::string& what) : InputError(what) {}
    ContradictoryConstraints(std::size_t clique_a, std::size_t clique_b, const std::string& what)
        : InputError(what), cliques_(std::pair{clique_a, clique_b}) {}

    /// Offending clique pair, when the contradiction was found during propagation.
    const std::optional<std::pair<std::size_t, std::size_t>>& cliques() const noexcept {
        return cliques_;
    }

private:
    std::optional<std::pair<std::size_t, std::size_t>> cliques_;
};

class NoIncorrectLabelAvailable : public InputError {
public:
    using InputError::InputError;
};

class InfeasibleSideInfo : public InputError {
public:
    using InputError::InputError;
};

class InvalidInitialization : public InputError {
public:
    using InputError::InputError;
};

}  // namespace mcagg
