#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iaa/annotation.hpp"

namespace iaa {

enum class DegenerateFlag { SingleLabel, InsufficientPairs, ChanceIsOne };

std::string_view to_string(DegenerateFlag flag);

/// A coefficient value plus the degenerate-convention signal that produced it,
/// if any. Degenerate chance agreement yields 1.0 under perfect observed
/// agreement and 0.0 otherwise; never NaN.
struct Coefficient {
    double value = 0.0;
    std::optional<DegenerateFlag> degenerate;
};

/// Two-annotator contingency counts; rows are the first annotator's label.
struct ConfusionTable {
    LabelSpace labels;
    std::vector<std::uint64_t> counts;  // k x k, row-major
    std::uint64_t n_pairable = 0;

    std::uint64_t at(std::size_t row, std::size_t col) const {
        return counts[row * labels.size() + col];
    }
};

struct CoincidenceMatrix {
    LabelSpace labels;
    std::vector<double> o;                    // k x k, row-major, symmetric
    std::vector<std::uint64_t> value_counts;  // pairable values per label
    std::vector<double> n_c;                  // marginals (row sums of o)
    double n = 0.0;

    double at(std::size_t row, std::size_t col) const { return o[row * labels.size() + col]; }
};

struct AgreementProfile {
    double percent_agreement = 0.0;
    std::optional<double> cohen_kappa;
    std::optional<double> fleiss_kappa;
    std::optional<double> krippendorff_alpha;
    std::size_t n_units = 0;
    std::size_t n_annotators = 0;
    std::size_t n_labels = 0;
    std::size_t cohen_pairs_used = 0;
    bool varying_rater_counts = false;
    std::set<DegenerateFlag> degenerate_flags;

    bool operator==(const AgreementProfile&) const = default;
};

struct ProfileOptions {
    /// With more than two annotators, pairs sharing fewer units than this are
    /// left out of the mean pairwise Cohen's kappa.
    std::size_t min_units_per_pair = 10;
};

ConfusionTable confusion_table(const ReliabilityData& data, std::string_view a1, std::string_view a2);
ConfusionTable confusion_table(const ReliabilityData& data, std::size_t a1, std::size_t a2);

Coefficient cohen_kappa(const ConfusionTable& table);

Coefficient fleiss_kappa(const ReliabilityData& data);

CoincidenceMatrix coincidence_matrix(const ReliabilityData& data);

Coefficient krippendorff_alpha(const CoincidenceMatrix& m);

/// Percent agreement, Cohen (mean over qualifying pairs when there are more
/// than two annotators), Fleiss and Krippendorff's alpha for one slice.
AgreementProfile profile(const ReliabilityData& data, const ProfileOptions& options = {});

enum class StatisticKind { Cohen, Fleiss, Alpha };

struct BootstrapStatistic {
    StatisticKind kind = StatisticKind::Alpha;
    std::string a1;  // Cohen only
    std::string a2;

    static BootstrapStatistic cohen(std::string a1, std::string a2) {
        return {StatisticKind::Cohen, std::move(a1), std::move(a2)};
    }
    static BootstrapStatistic fleiss() { return {StatisticKind::Fleiss, {}, {}}; }
    static BootstrapStatistic alpha() { return {StatisticKind::Alpha, {}, {}}; }
};

std::string_view to_string(StatisticKind kind);

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double confidence = 0.0;
    std::size_t n_resamples = 0;
    std::size_t n_used = 0;  // resamples where the statistic was computable
};

/// Percentile interval from a unit-level bootstrap. Resample r draws its
/// units from an engine seeded by (seed, r) alone, so results do not depend
/// on evaluation order.
ConfidenceInterval bootstrap_ci(const ReliabilityData& data, const BootstrapStatistic& statistic,
                                std::size_t n_resamples, double confidence, std::uint64_t seed);

}  // namespace iaa
