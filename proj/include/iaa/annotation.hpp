#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iaa/errors.hpp"

namespace iaa {

enum class InputFormat { Jsonl, Csv };

std::optional<InputFormat> parse_input_format(std::string_view name);

/// One (document class, document, item, annotator, label) observation.
struct AnnotationRecord {
    std::string doc_class;
    std::string doc_id;
    std::string item_id;
    std::string annotator_id;
    std::string label;

    bool operator==(const AnnotationRecord&) const = default;
};

/// The thing annotators must agree on: one item of one document.
struct UnitKey {
    std::string doc_class;
    std::string doc_id;
    std::string item_id;

    auto operator<=>(const UnitKey&) const = default;
    bool operator==(const UnitKey&) const = default;
};

enum class LabelOrigin { Observed, Declared };

class LabelSpace {
public:
    LabelSpace() = default;

    /// Sorted, deduplicated.
    static LabelSpace observed(std::vector<std::string> labels);
    /// Keeps file order; duplicates are rejected.
    static LabelSpace declared(std::vector<std::string> labels);

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    LabelOrigin origin() const noexcept { return origin_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::optional<std::uint32_t> index_of(std::string_view label) const;
    const std::string& operator[](std::size_t i) const { return labels_[i]; }

    bool operator==(const LabelSpace&) const = default;

private:
    std::vector<std::string> labels_;
    LabelOrigin origin_ = LabelOrigin::Observed;
};

using Cell = std::optional<std::uint32_t>;

/// Units x annotators grid of optional label indices. Immutable once built.
class ReliabilityData {
public:
    ReliabilityData(std::vector<UnitKey> units, std::vector<std::string> annotators,
                    LabelSpace labels, std::vector<Cell> cells);

    const std::vector<UnitKey>& units() const noexcept { return units_; }
    const std::vector<std::string>& annotators() const noexcept { return annotators_; }
    const LabelSpace& labels() const noexcept { return labels_; }

    std::size_t unit_count() const noexcept { return units_.size(); }
    std::size_t annotator_count() const noexcept { return annotators_.size(); }
    std::size_t label_count() const noexcept { return labels_.size(); }

    Cell cell(std::size_t unit, std::size_t annotator) const {
        return cells_[unit * annotators_.size() + annotator];
    }
    const std::vector<Cell>& cells() const noexcept { return cells_; }

    std::optional<std::size_t> annotator_index(std::string_view id) const;
    std::size_t present_in_unit(std::size_t unit) const;
    std::set<std::string> doc_classes() const;

    /// Present cells as records, ordered by (unit, annotator).
    std::vector<AnnotationRecord> to_records() const;

    bool operator==(const ReliabilityData&) const = default;

private:
    std::vector<UnitKey> units_;
    std::vector<std::string> annotators_;
    LabelSpace labels_;
    std::vector<Cell> cells_;
};

/// Trims surrounding whitespace and applies NFC normalization. Returns
/// nullopt when `raw` is not valid UTF-8.
std::optional<std::string> normalize_field(std::string_view raw);

struct Diagnostic {
    std::size_t line;
    ErrorKind kind;
    std::string message;
    std::optional<std::size_t> previous_line = std::nullopt;  // DuplicateAssignment only
};

struct ParseOutcome {
    std::vector<AnnotationRecord> records;
    std::vector<std::size_t> lines;  // 1-based source line of each record
    std::vector<Diagnostic> diagnostics;
};

/// Parses every line, collecting all problems instead of stopping at the first.
ParseOutcome scan_records(std::istream& source, InputFormat format);

/// Records in file order. Throws the first diagnostic as an Error.
std::vector<AnnotationRecord> parse_records(std::istream& source, InputFormat format);

std::string serialize_records(const std::vector<AnnotationRecord>& records, InputFormat format);

ReliabilityData build_reliability_matrix(
    const std::vector<AnnotationRecord>& records,
    const std::optional<std::vector<std::string>>& declared_labels = std::nullopt);

struct ByDocClass {
    std::string doc_class;
};
struct ByAnnotators {
    std::set<std::string> annotators;
};
using SliceSelector = std::variant<ByDocClass, ByAnnotators>;

/// Units left with no present cell are dropped; the label space is kept.
ReliabilityData slice(const ReliabilityData& data, const SliceSelector& selector);

}  // namespace iaa
