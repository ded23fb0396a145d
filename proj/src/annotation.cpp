#include "iaa/annotation.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <map>
#include <sstream>
#include <tuple>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "csv.hpp"
#include "json.hpp"

namespace iaa {

namespace {

constexpr std::array<std::string_view, 5> kFieldNames = {"doc_class", "doc_id", "item_id",
                                                         "annotator_id", "label"};

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// Validates and normalizes the five raw fields into a record. Pushes a
// diagnostic and returns nullopt on failure.
std::optional<AnnotationRecord> make_record(const std::array<std::string, 5>& raw,
                                            std::size_t line, std::vector<Diagnostic>& diags) {
    std::array<std::string, 5> clean;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto norm = normalize_field(raw[i]);
        if (!norm) {
            diags.push_back({line, ErrorKind::MalformedLine,
                             line_prefix(line) + "field '" + std::string(kFieldNames[i]) +
                                 "' is not valid UTF-8"});
            return std::nullopt;
        }
        if (norm->empty()) {
            diags.push_back({line, ErrorKind::EmptyField,
                             line_prefix(line) + "field '" + std::string(kFieldNames[i]) +
                                 "' is empty"});
            return std::nullopt;
        }
        clean[i] = std::move(*norm);
    }
    return AnnotationRecord{std::move(clean[0]), std::move(clean[1]), std::move(clean[2]),
                            std::move(clean[3]), std::move(clean[4])};
}

void scan_jsonl(std::string_view text, ParseOutcome& out) {
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line;
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (raw.find_first_not_of(" \t") == std::string_view::npos) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::parse_error&) {
            out.diagnostics.push_back(
                {line, ErrorKind::MalformedLine, line_prefix(line) + "invalid JSON"});
            continue;
        }
        if (!obj.is_object()) {
            out.diagnostics.push_back(
                {line, ErrorKind::MalformedLine, line_prefix(line) + "expected a JSON object"});
            continue;
        }

        std::array<std::string, 5> fields;
        std::optional<std::string> problem;
        for (const auto& [key, value] : obj.items()) {
            auto it = std::find(kFieldNames.begin(), kFieldNames.end(), key);
            if (it == kFieldNames.end()) {
                problem = "unknown key '" + key + "'";
                break;
            }
            if (!value.is_string()) {
                problem = "key '" + key + "' must be a string";
                break;
            }
        }
        if (!problem) {
            for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
                auto it = obj.find(std::string(kFieldNames[i]));
                if (it == obj.end()) {
                    problem = "missing key '" + std::string(kFieldNames[i]) + "'";
                    break;
                }
                fields[i] = it->get<std::string>();
            }
        }
        if (problem) {
            out.diagnostics.push_back({line, ErrorKind::MalformedLine, line_prefix(line) + *problem});
            continue;
        }
        if (auto rec = make_record(fields, line, out.diagnostics)) {
            out.records.push_back(std::move(*rec));
            out.lines.push_back(line);
        }
    }
}

void scan_csv(std::string_view text, ParseOutcome& out) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    auto rows = csv::read_rows(text);
    if (rows.empty()) return;

    const auto& header = rows.front();
    const bool header_ok =
        !header.error && header.fields.size() == kFieldNames.size() &&
        std::equal(header.fields.begin(), header.fields.end(), kFieldNames.begin());
    if (!header_ok) {
        out.diagnostics.push_back({header.line, ErrorKind::MalformedLine,
                                   line_prefix(header.line) +
                                       "header must be doc_class,doc_id,item_id,annotator_id,label"});
        return;
    }

    for (auto it = std::next(rows.begin()); it != rows.end(); ++it) {
        if (it->error) {
            out.diagnostics.push_back(
                {it->line, ErrorKind::MalformedLine, line_prefix(it->line) + *it->error});
            continue;
        }
        if (it->fields.size() != kFieldNames.size()) {
            out.diagnostics.push_back({it->line, ErrorKind::MalformedLine,
                                       line_prefix(it->line) + "expected 5 fields, found " +
                                           std::to_string(it->fields.size())});
            continue;
        }
        std::array<std::string, 5> fields;
        std::move(it->fields.begin(), it->fields.end(), fields.begin());
        if (auto rec = make_record(fields, it->line, out.diagnostics)) {
            out.records.push_back(std::move(*rec));
            out.lines.push_back(it->line);
        }
    }
}

using AssignmentKey = std::tuple<std::string, std::string, std::string, std::string>;

AssignmentKey assignment_key(const AnnotationRecord& r) {
    return {r.doc_class, r.doc_id, r.item_id, r.annotator_id};
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view name) {
    if (name == "jsonl") return InputFormat::Jsonl;
    if (name == "csv") return InputFormat::Csv;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// LabelSpace

LabelSpace LabelSpace::observed(std::vector<std::string> labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    LabelSpace space;
    space.labels_ = std::move(labels);
    space.origin_ = LabelOrigin::Observed;
    return space;
}

LabelSpace LabelSpace::declared(std::vector<std::string> labels) {
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorKind::InvalidArgument, "declared label list contains duplicates");
    }
    LabelSpace space;
    space.labels_ = std::move(labels);
    space.origin_ = LabelOrigin::Declared;
    return space;
}

std::optional<std::uint32_t> LabelSpace::index_of(std::string_view label) const {
    if (origin_ == LabelOrigin::Observed) {
        auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
        if (it != labels_.end() && *it == label) {
            return static_cast<std::uint32_t>(it - labels_.begin());
        }
        return std::nullopt;
    }
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::uint32_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------
// ReliabilityData

ReliabilityData::ReliabilityData(std::vector<UnitKey> units, std::vector<std::string> annotators,
                                 LabelSpace labels, std::vector<Cell> cells)
    : units_(std::move(units)),
      annotators_(std::move(annotators)),
      labels_(std::move(labels)),
      cells_(std::move(cells)) {
    if (cells_.size() != units_.size() * annotators_.size()) {
        throw Error(ErrorKind::InvalidArgument, "grid size does not match units x annotators");
    }
    for (const auto& c : cells_) {
        if (c && *c >= labels_.size()) {
            throw Error(ErrorKind::InvalidArgument, "cell label index out of range");
        }
    }
    auto sorted_units = units_;
    std::sort(sorted_units.begin(), sorted_units.end());
    if (std::adjacent_find(sorted_units.begin(), sorted_units.end()) != sorted_units.end()) {
        throw Error(ErrorKind::InvalidArgument, "duplicate unit key");
    }
    auto sorted_annotators = annotators_;
    std::sort(sorted_annotators.begin(), sorted_annotators.end());
    if (std::adjacent_find(sorted_annotators.begin(), sorted_annotators.end()) !=
        sorted_annotators.end()) {
        throw Error(ErrorKind::InvalidArgument, "duplicate annotator id");
    }
}

std::optional<std::size_t> ReliabilityData::annotator_index(std::string_view id) const {
    auto it = std::find(annotators_.begin(), annotators_.end(), id);
    if (it == annotators_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - annotators_.begin());
}

std::size_t ReliabilityData::present_in_unit(std::size_t unit) const {
    std::size_t count = 0;
    for (std::size_t a = 0; a < annotators_.size(); ++a) {
        if (cell(unit, a)) ++count;
    }
    return count;
}

std::set<std::string> ReliabilityData::doc_classes() const {
    std::set<std::string> out;
    for (const auto& u : units_) out.insert(u.doc_class);
    return out;
}

std::vector<AnnotationRecord> ReliabilityData::to_records() const {
    std::vector<AnnotationRecord> out;
    for (std::size_t u = 0; u < units_.size(); ++u) {
        for (std::size_t a = 0; a < annotators_.size(); ++a) {
            if (auto c = cell(u, a)) {
                out.push_back({units_[u].doc_class, units_[u].doc_id, units_[u].item_id,
                               annotators_[a], labels_[*c]});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

std::optional<std::string> normalize_field(std::string_view raw) {
    const auto ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    std::string round_trip;
    ustr.toUTF8String(round_trip);
    if (round_trip != raw) return std::nullopt;

    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) return std::nullopt;
    icu::UnicodeString normalized = nfc->normalize(ustr, status);
    if (U_FAILURE(status)) return std::nullopt;
    normalized.trim();

    std::string out;
    normalized.toUTF8String(out);
    return out;
}

ParseOutcome scan_records(std::istream& source, InputFormat format) {
    const std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    ParseOutcome out;
    if (format == InputFormat::Jsonl) {
        scan_jsonl(text, out);
    } else {
        scan_csv(text, out);
    }

    std::map<AssignmentKey, std::size_t> first_line;
    std::vector<AnnotationRecord> kept;
    std::vector<std::size_t> kept_lines;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        auto [it, inserted] = first_line.emplace(assignment_key(out.records[i]), out.lines[i]);
        if (!inserted) {
            const auto& r = out.records[i];
            out.diagnostics.push_back(
                {out.lines[i], ErrorKind::DuplicateAssignment,
                 line_prefix(out.lines[i]) + "annotator '" + r.annotator_id + "' already labeled (" +
                     r.doc_class + ", " + r.doc_id + ", " + r.item_id + ") at line " +
                     std::to_string(it->second),
                 it->second});
            continue;
        }
        kept.push_back(std::move(out.records[i]));
        kept_lines.push_back(out.lines[i]);
    }
    out.records = std::move(kept);
    out.lines = std::move(kept_lines);
    std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    return out;
}

std::vector<AnnotationRecord> parse_records(std::istream& source, InputFormat format) {
    auto outcome = scan_records(source, format);
    if (!outcome.diagnostics.empty()) {
        const auto& d = outcome.diagnostics.front();
        throw Error(d.kind, d.message, d.line, d.previous_line);
    }
    return std::move(outcome.records);
}

std::string serialize_records(const std::vector<AnnotationRecord>& records, InputFormat format) {
    std::ostringstream out;
    if (format == InputFormat::Jsonl) {
        for (const auto& r : records) {
            nlohmann::ordered_json obj;
            obj["doc_class"] = r.doc_class;
            obj["doc_id"] = r.doc_id;
            obj["item_id"] = r.item_id;
            obj["annotator_id"] = r.annotator_id;
            obj["label"] = r.label;
            out << obj.dump() << '\n';
        }
        return out.str();
    }
    out << "doc_class,doc_id,item_id,annotator_id,label\n";
    for (const auto& r : records) {
        out << csv::quote_field(r.doc_class) << ',' << csv::quote_field(r.doc_id) << ','
            << csv::quote_field(r.item_id) << ',' << csv::quote_field(r.annotator_id) << ','
            << csv::quote_field(r.label) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Alignment

ReliabilityData build_reliability_matrix(const std::vector<AnnotationRecord>& records,
                                         const std::optional<std::vector<std::string>>& declared_labels) {
    if (records.empty()) throw Error(ErrorKind::EmptyDataset, "no annotation records");

    auto must_normalize = [](const std::string& s) {
        auto norm = normalize_field(s);
        if (!norm) throw Error(ErrorKind::InvalidArgument, "field is not valid UTF-8");
        if (norm->empty()) throw Error(ErrorKind::EmptyField, "record has an empty field");
        return std::move(*norm);
    };

    std::vector<AnnotationRecord> clean;
    clean.reserve(records.size());
    for (const auto& r : records) {
        clean.push_back({must_normalize(r.doc_class), must_normalize(r.doc_id),
                         must_normalize(r.item_id), must_normalize(r.annotator_id),
                         must_normalize(r.label)});
    }

    LabelSpace labels;
    if (declared_labels) {
        std::vector<std::string> declared;
        for (const auto& l : *declared_labels) declared.push_back(must_normalize(l));
        labels = LabelSpace::declared(std::move(declared));
        for (const auto& r : clean) {
            if (!labels.index_of(r.label)) {
                throw Error(ErrorKind::UnknownLabel, "label '" + r.label + "' is not declared");
            }
        }
    } else {
        std::vector<std::string> seen;
        for (const auto& r : clean) seen.push_back(r.label);
        labels = LabelSpace::observed(std::move(seen));
    }

    std::vector<UnitKey> units;
    std::vector<std::string> annotators;
    for (const auto& r : clean) {
        units.push_back({r.doc_class, r.doc_id, r.item_id});
        annotators.push_back(r.annotator_id);
    }
    std::sort(units.begin(), units.end());
    units.erase(std::unique(units.begin(), units.end()), units.end());
    std::sort(annotators.begin(), annotators.end());
    annotators.erase(std::unique(annotators.begin(), annotators.end()), annotators.end());

    std::vector<Cell> cells(units.size() * annotators.size());
    for (const auto& r : clean) {
        const UnitKey key{r.doc_class, r.doc_id, r.item_id};
        const auto u = static_cast<std::size_t>(
            std::lower_bound(units.begin(), units.end(), key) - units.begin());
        const auto a = static_cast<std::size_t>(
            std::lower_bound(annotators.begin(), annotators.end(), r.annotator_id) -
            annotators.begin());
        auto& slot = cells[u * annotators.size() + a];
        if (slot) {
            throw Error(ErrorKind::DuplicateAssignment,
                        "annotator '" + r.annotator_id + "' labeled (" + r.doc_class + ", " +
                            r.doc_id + ", " + r.item_id + ") twice");
        }
        slot = *labels.index_of(r.label);
    }
    return ReliabilityData(std::move(units), std::move(annotators), std::move(labels),
                           std::move(cells));
}

ReliabilityData slice(const ReliabilityData& data, const SliceSelector& selector) {
    std::vector<std::size_t> columns;
    std::vector<bool> unit_selected(data.unit_count(), true);

    if (const auto* by_class = std::get_if<ByDocClass>(&selector)) {
        for (std::size_t a = 0; a < data.annotator_count(); ++a) columns.push_back(a);
        for (std::size_t u = 0; u < data.unit_count(); ++u) {
            unit_selected[u] = data.units()[u].doc_class == by_class->doc_class;
        }
    } else {
        const auto& wanted = std::get<ByAnnotators>(selector).annotators;
        for (std::size_t a = 0; a < data.annotator_count(); ++a) {
            if (wanted.contains(data.annotators()[a])) columns.push_back(a);
        }
        if (columns.size() < 2) {
            throw Error(ErrorKind::EmptySlice, "annotator selector matches fewer than two annotators");
        }
    }

    std::vector<UnitKey> units;
    std::vector<Cell> cells;
    for (std::size_t u = 0; u < data.unit_count(); ++u) {
        if (!unit_selected[u]) continue;
        bool any = false;
        for (auto a : columns) any = any || data.cell(u, a).has_value();
        if (!any) continue;
        units.push_back(data.units()[u]);
        for (auto a : columns) cells.push_back(data.cell(u, a));
    }
    if (units.empty()) throw Error(ErrorKind::EmptySlice, "selector matches no labeled units");

    std::vector<std::string> annotators;
    for (auto a : columns) annotators.push_back(data.annotators()[a]);
    return ReliabilityData(std::move(units), std::move(annotators), data.labels(), std::move(cells));
}

}  // namespace iaa
