#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "iaa/annotation.hpp"
#include "test_support.hpp"

namespace iaa {
namespace {

std::vector<AnnotationRecord> parse(const std::string& text, InputFormat format) {
    std::istringstream in(text);
    return parse_records(in, format);
}

Error parse_error(const std::string& text, InputFormat format) {
    try {
        parse(text, format);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "expected a parse error";
    return Error(ErrorKind::Io, "none");
}

const std::string kHeader = "doc_class,doc_id,item_id,annotator_id,label\n";

TEST(ParseRecords, JsonlSingleLine) {
    const auto records = parse(
        R"({"doc_class":"official","doc_id":"d1","item_id":"i1","annotator_id":"A","label":"name"})"
        "\n",
        InputFormat::Jsonl);
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0], (AnnotationRecord{"official", "d1", "i1", "A", "name"}));
}

TEST(ParseRecords, CsvEmptyLabelIsEmptyField) {
    const auto e = parse_error(kHeader + "official,d1,i1,A,\n", InputFormat::Csv);
    EXPECT_EQ(e.kind(), ErrorKind::EmptyField);
    EXPECT_EQ(e.line(), 2u);
}

TEST(ParseRecords, WhitespaceOnlyFieldIsEmpty) {
    const auto e = parse_error(
        R"({"doc_class":"official","doc_id":"d1","item_id":"i1","annotator_id":"  ","label":"x"})", InputFormat::Jsonl);
    EXPECT_EQ(e.kind(), ErrorKind::EmptyField);
    EXPECT_EQ(e.line(), 1u);
}

TEST(ParseRecords, DuplicateAssignmentCitesBothLines) {
    const std::string text = kHeader +
                             "official,d1,i1,A,x\n"
                             "official,d1,i2,A,x\n"
                             "official,d1,i1,A,y\n";
    const auto e = parse_error(text, InputFormat::Csv);
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateAssignment);
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.previous_line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
}

TEST(ParseRecords, JsonlMalformedCases) {
    const std::vector<std::string> bad = {
        R"({"doc_class":"o","doc_id":"d","item_id":"i","annotator_id":"A"})",                      // missing key
        R"({"doc_class":"o","doc_id":"d","item_id":"i","annotator_id":"A","label":"x","extra":"1"})",  // unknown key
        R"({"doc_class":"o","doc_id":"d","item_id":"i","annotator_id":"A","label":3})",             // not a string
        R"(["o","d","i","A","x"])",                                                                 // not an object
        R"({"doc_class":"o",)",                                                                     // bad JSON
    };
    for (const auto& line : bad) {
        const auto e = parse_error("\n" + line + "\n", InputFormat::Jsonl);
        EXPECT_EQ(e.kind(), ErrorKind::MalformedLine) << line;
        EXPECT_EQ(e.line(), 2u) << line;
    }
}

TEST(ParseRecords, CsvHeaderAndFieldCount) {
    EXPECT_EQ(parse_error("a,b,c,d,e\n", InputFormat::Csv).kind(), ErrorKind::MalformedLine);
    const auto e = parse_error(kHeader + "o,d,i,A\n", InputFormat::Csv);
    EXPECT_EQ(e.kind(), ErrorKind::MalformedLine);
    EXPECT_EQ(e.line(), 2u);
}

TEST(ParseRecords, CsvQuotingCrlfAndMultilineFields) {
    const std::string text =
        "doc_class,doc_id,item_id,annotator_id,label\r\n"
        "\"official, certified\",d1,i1,A,\"say \"\"hi\"\"\"\r\n"
        "official,\"d\n2\",i1,A,x\r\n"
        "official,d3,i1,A,y\r\n";
    std::istringstream in(text);
    const auto outcome = scan_records(in, InputFormat::Csv);
    ASSERT_TRUE(outcome.diagnostics.empty());
    ASSERT_EQ(outcome.records.size(), 3u);
    EXPECT_EQ(outcome.records[0].doc_class, "official, certified");
    EXPECT_EQ(outcome.records[0].label, "say \"hi\"");
    EXPECT_EQ(outcome.records[1].doc_id, "d\n2");
    EXPECT_EQ(outcome.lines, (std::vector<std::size_t>{2, 3, 5}));
}

TEST(ParseRecords, CsvUnterminatedQuote) {
    const auto e = parse_error(kHeader + "o,d,i,A,\"x\n", InputFormat::Csv);
    EXPECT_EQ(e.kind(), ErrorKind::MalformedLine);
    EXPECT_EQ(e.line(), 2u);
}

TEST(ParseRecords, ScanCollectsEveryProblem) {
    std::istringstream in(kHeader + "o,d,i1,A,\n" + "o,d,i2\n" + "o,d,i3,A,x\n");
    const auto outcome = scan_records(in, InputFormat::Csv);
    ASSERT_EQ(outcome.diagnostics.size(), 2u);
    EXPECT_EQ(outcome.diagnostics[0].line, 2u);
    EXPECT_EQ(outcome.diagnostics[1].line, 3u);
    EXPECT_EQ(outcome.records.size(), 1u);
}

TEST(ParseRecords, InvalidUtf8IsMalformed) {
    const auto e = parse_error(kHeader + "o,d,i,A,\xff\xfe\n", InputFormat::Csv);
    EXPECT_EQ(e.kind(), ErrorKind::MalformedLine);
}

TEST(NormalizeField, TrimsAndComposes) {
    // "e" + combining acute composes to U+00E9.
    EXPECT_EQ(normalize_field("  e\xCC\x81  "), std::optional<std::string>("\xC3\xA9"));
    EXPECT_EQ(normalize_field("Birth_Date"), std::optional<std::string>("Birth_Date"));
    EXPECT_FALSE(normalize_field("\xC3").has_value());
}

TEST(ParseRecords, NormalizedLabelsCompareEqualButCaseMatters) {
    const std::string text = kHeader +
                             "o,d,i1,A,caf\xC3\xA9\n"
                             "o,d,i1,B,cafe\xCC\x81\n"
                             "o,d,i2,A,Name\n"
                             "o,d,i2,B,name\n";
    const auto data = build_reliability_matrix(parse(text, InputFormat::Csv));
    EXPECT_EQ(data.label_count(), 3u);
    EXPECT_EQ(data.cell(0, 0), data.cell(0, 1));
    EXPECT_NE(data.cell(1, 0), data.cell(1, 1));
}

TEST(RoundTrip, ParseOfSerializeIsIdentityForBothFormats) {
    std::mt19937_64 rng(7);
    const std::vector<std::string> awkward = {"plain", "with,comma", "with \"quote\"", "multi\nline", "caf\xC3\xA9",
                                              "tab\there"};
    std::uniform_int_distribution<std::size_t> pick(0, awkward.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AnnotationRecord> records;
        for (int i = 0; i < 20; ++i) {
            records.push_back({awkward[pick(rng)], "d" + std::to_string(i), awkward[pick(rng)],
                               "A" + std::to_string(trial), awkward[pick(rng)]});
        }
        for (auto format : {InputFormat::Jsonl, InputFormat::Csv}) {
            EXPECT_EQ(parse(serialize_records(records, format), format), records);
        }
    }
}

TEST(BuildReliabilityMatrix, AlignsWithMissingCell) {
    const std::vector<AnnotationRecord> records = {
        {"official", "d1", "i1", "A", "x"}, {"official", "d1", "i1", "B", "x"}, {"official", "d1", "i2", "A", "y"}};
    const auto data = build_reliability_matrix(records);
    ASSERT_EQ(data.unit_count(), 2u);
    ASSERT_EQ(data.annotator_count(), 2u);
    EXPECT_EQ(data.units()[1].item_id, "i2");
    EXPECT_EQ(data.labels().labels(), (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(data.labels().origin(), LabelOrigin::Observed);
    EXPECT_EQ(data.cell(0, 0), Cell(0));
    EXPECT_EQ(data.cell(0, 1), Cell(0));
    EXPECT_EQ(data.cell(1, 0), Cell(1));
    EXPECT_FALSE(data.cell(1, 1).has_value());
}

TEST(BuildReliabilityMatrix, ReversedOrderGivesIdenticalData) {
    const std::vector<AnnotationRecord> records = {
        {"official", "d1", "i1", "A", "x"}, {"official", "d1", "i1", "B", "x"}, {"official", "d1", "i2", "A", "y"}};
    const std::vector<AnnotationRecord> reversed(records.rbegin(), records.rend());
    EXPECT_EQ(build_reliability_matrix(records), build_reliability_matrix(reversed));
}

TEST(BuildReliabilityMatrix, PermutationInvariantProperty) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto records = testing::random_data(rng).to_records();
        const auto expected = build_reliability_matrix(records);
        std::shuffle(records.begin(), records.end(), rng);
        EXPECT_EQ(build_reliability_matrix(records), expected);
    }
}

TEST(BuildReliabilityMatrix, DeclaredLabels) {
    const std::vector<AnnotationRecord> records = {{"o", "d", "i", "A", "y"}};
    try {
        build_reliability_matrix(records, std::vector<std::string>{"x"});
        FAIL() << "expected UnknownLabel";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownLabel);
    }
    const auto data = build_reliability_matrix(records, std::vector<std::string>{"z", "y"});
    EXPECT_EQ(data.labels().origin(), LabelOrigin::Declared);
    EXPECT_EQ(data.labels().labels(), (std::vector<std::string>{"z", "y"}));
    EXPECT_EQ(data.cell(0, 0), Cell(1));
}

TEST(BuildReliabilityMatrix, EmptyInput) {
    try {
        build_reliability_matrix({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyDataset);
    }
}

ReliabilityData mixed_dataset() {
    return build_reliability_matrix({
        {"official", "d1", "i1", "A", "x"},
        {"official", "d1", "i1", "B", "x"},
        {"official", "d1", "i1", "C", "y"},
        {"lading", "d2", "i1", "A", "x"},
        {"lading", "d2", "i1", "C", "x"},
        {"lading", "d2", "i2", "B", "y"},
    });
}

TEST(Slice, ByDocClass) {
    const auto s = slice(mixed_dataset(), ByDocClass{"official"});
    ASSERT_EQ(s.unit_count(), 1u);
    EXPECT_EQ(s.units()[0].doc_class, "official");
    EXPECT_EQ(s.annotator_count(), 3u);
    EXPECT_EQ(s.labels(), mixed_dataset().labels());
}

TEST(Slice, ByAnnotatorsDropsEmptyUnits) {
    const auto s = slice(mixed_dataset(), ByAnnotators{{"A", "C"}});
    EXPECT_EQ(s.annotators(), (std::vector<std::string>{"A", "C"}));
    // (lading, d2, i2) only had B.
    EXPECT_EQ(s.unit_count(), 2u);
}

TEST(Slice, Errors) {
    for (const SliceSelector& sel : {SliceSelector{ByDocClass{"unknown"}}, SliceSelector{ByAnnotators{{"A"}}},
                                     SliceSelector{ByAnnotators{{"A", "Z"}}}}) {
        try {
            slice(mixed_dataset(), sel);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::EmptySlice);
        }
    }
}

TEST(Slice, IndependentSelectorsCommute) {
    std::mt19937_64 rng(3);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto records = testing::random_data(rng).to_records();
        for (std::size_t i = 0; i < records.size(); ++i) records[i].doc_class = i % 3 == 0 ? "p" : "q";
        const auto data = build_reliability_matrix(records);
        if (data.annotator_count() < 2) continue;
        const SliceSelector by_class = ByDocClass{"q"};
        std::set<std::string> chosen(data.annotators().begin(), data.annotators().begin() + 2);
        const SliceSelector by_annot = ByAnnotators{chosen};
        std::optional<ReliabilityData> ab;
        std::optional<ReliabilityData> ba;
        try {
            ab = slice(slice(data, by_class), by_annot);
        } catch (const Error&) {
        }
        try {
            ba = slice(slice(data, by_annot), by_class);
        } catch (const Error&) {
        }
        ASSERT_EQ(ab.has_value(), ba.has_value());
        if (ab) {
            EXPECT_EQ(*ab, *ba);
            ++compared;
        }
    }
    EXPECT_GT(compared, 100);
}

TEST(ReliabilityData, RejectsInconsistentGrid) {
    EXPECT_THROW(ReliabilityData({{"c", "d", "u"}}, {"A"}, LabelSpace::observed({"x"}), {Cell(0), Cell(0)}), Error);
    EXPECT_THROW(ReliabilityData({{"c", "d", "u"}}, {"A"}, LabelSpace::observed({"x"}), {Cell(3)}), Error);
    EXPECT_THROW(ReliabilityData({{"c", "d", "u"}}, {"A", "A"}, LabelSpace::observed({"x"}), {Cell(0), Cell(0)}),
                 Error);
}

}  // namespace
}  // namespace iaa
