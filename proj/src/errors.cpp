#include "iaa/errors.hpp"

namespace iaa {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::EmptyField: return "EmptyField";
    case ErrorKind::DuplicateAssignment: return "DuplicateAssignment";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::EmptySlice: return "EmptySlice";
    case ErrorKind::NoPairableUnits: return "NoPairableUnits";
    case ErrorKind::UnknownAnnotator: return "UnknownAnnotator";
    case ErrorKind::InsufficientPairs: return "InsufficientPairs";
    case ErrorKind::FewerThanTwoAnnotators: return "FewerThanTwoAnnotators";
    case ErrorKind::NoRankableClasses: return "NoRankableClasses";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> line,
             std::optional<std::size_t> previous_line)
    : std::runtime_error(message), kind_(kind), line_(line), previous_line_(previous_line) {}

}  // namespace iaa
