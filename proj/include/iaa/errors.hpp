#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iaa {

enum class ErrorKind {
    MalformedLine,
    EmptyField,
    DuplicateAssignment,
    UnknownLabel,
    EmptyDataset,
    EmptySlice,
    NoPairableUnits,
    UnknownAnnotator,
    InsufficientPairs,
    FewerThanTwoAnnotators,
    NoRankableClasses,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `line` is 1-based when the error
/// points into an input file; DuplicateAssignment also carries the line of
/// the first assignment in `previous_line`.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> line = std::nullopt,
          std::optional<std::size_t> previous_line = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<std::size_t> previous_line() const noexcept { return previous_line_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> line_;
    std::optional<std::size_t> previous_line_;
};

}  // namespace iaa
