#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace varest {

enum class ErrorKind {
    MissingFile,
    MalformedRow,
    DegeneratePopulation,
    MissingKey,
    InvariantViolation,
    InvalidDesign,
    TooManyCombinations,
    DegenerateSample,
    DegenerateAuxiliary,
    InvalidSpec,
    NumericalDomain,
    SingularOptimum,
    EmptyGrid,
};

inline constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MissingFile: return "MissingFile";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::DegeneratePopulation: return "DegeneratePopulation";
        case ErrorKind::MissingKey: return "MissingKey";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::InvalidDesign: return "InvalidDesign";
        case ErrorKind::TooManyCombinations: return "TooManyCombinations";
        case ErrorKind::DegenerateSample: return "DegenerateSample";
        case ErrorKind::DegenerateAuxiliary: return "DegenerateAuxiliary";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::NumericalDomain: return "NumericalDomain";
        case ErrorKind::SingularOptimum: return "SingularOptimum";
        case ErrorKind::EmptyGrid: return "EmptyGrid";
    }
    return "Unknown";
}

/// Single exception type for the library; `kind()` carries the category and
/// `line()` the 1-based input line for MalformedRow.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail, std::size_t line = 0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), line_(line) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    std::size_t line_;
};

}  // namespace varest
