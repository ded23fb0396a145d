#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "iaa/metrics.hpp"

// Row-indexed variants of the metric kernels. A row list may repeat units,
// which is how bootstrap resamples are evaluated without copying the grid.
namespace iaa::detail {

using Rows = std::span<const std::size_t>;

std::vector<std::size_t> all_rows(const ReliabilityData& data);

ConfusionTable confusion_rows(const ReliabilityData& data, std::size_t a1, std::size_t a2, Rows rows);

struct FleissParts {
    std::size_t included_units = 0;
    double mean_unit_agreement = 0.0;  // P-bar, also the percent agreement
    std::uint64_t pooled_square_sum = 0;  // sum over labels of t_j^2
    std::uint64_t pooled_total = 0;       // N, included cells
    bool varying_rater_counts = false;
};

/// nullopt when no row has at least two present cells.
std::optional<FleissParts> fleiss_parts(const ReliabilityData& data, Rows rows);

Coefficient fleiss_from_parts(const FleissParts& parts);

std::optional<CoincidenceMatrix> coincidence_rows(const ReliabilityData& data, Rows rows);

}  // namespace iaa::detail
