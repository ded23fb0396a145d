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

/// Symmetric annotator x annotator Cohen's kappa matrix. Off-diagonal cells
/// are absent when the pair shares fewer than `min_units_per_pair` units.
struct PairwiseMatrix {
    std::vector<std::string> annotators;
    std::vector<std::optional<double>> values;  // n x n, row-major, diagonal 1.0
    std::vector<std::uint64_t> pairable;        // shared units per pair
    std::optional<std::string> doc_class;
    std::size_t min_units_per_pair = 10;

    std::size_t size() const noexcept { return annotators.size(); }
    std::optional<double> at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
    std::uint64_t pairable_at(std::size_t i, std::size_t j) const { return pairable[i * size() + j]; }
    static constexpr std::string_view coefficient = "cohen";
};

/// Restricts to `doc_class` first when given.
PairwiseMatrix pairwise_matrix(const ReliabilityData& data,
                               const std::optional<std::string>& doc_class = std::nullopt,
                               std::size_t min_units_per_pair = 10);

enum class WorkerFlag { BelowAbsolute, BelowDeviation, InsufficientData };
enum class Recommendation { None, Retrain, Rework };

std::string_view to_string(WorkerFlag flag);
std::string_view to_string(Recommendation rec);

struct FlagThresholds {
    double min_abs_kappa = 0.8;
    double deviation_delta = 0.1;
};

struct WorkerSummary {
    std::string annotator_id;
    std::optional<double> mean_pairwise_kappa;
    std::size_t n_pairs_used = 0;
    /// Mean of the other workers' means; the baseline for below_deviation.
    std::optional<double> peer_mean;
    std::set<WorkerFlag> flags;
    Recommendation recommendation = Recommendation::None;
};

struct WorkerFlagReport {
    std::vector<WorkerSummary> per_worker;  // sorted by annotator_id
    FlagThresholds thresholds_used;
    std::optional<double> group_mean;
    std::optional<std::string> doc_class;

    /// True when some worker has a below_* flag.
    bool any_flagged() const;
};

/// A worker is below_deviation when its mean falls more than deviation_delta
/// under the mean of the other workers' means. Retrain on one flag, rework
/// on both.
WorkerFlagReport flag_workers(const PairwiseMatrix& matrix, const FlagThresholds& thresholds);

struct ClassAgreement {
    std::string doc_class;
    std::optional<double> mean_pairwise;
};

/// Mean of each class's present off-diagonal cells, classes in sorted order.
std::vector<ClassAgreement> class_summary(const ReliabilityData& data, std::size_t min_units_per_pair = 10);

}  // namespace iaa
