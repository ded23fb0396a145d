#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "iaa/difficulty.hpp"
#include "iaa/workers.hpp"

namespace iaa {

struct ToolConfig {
    FlagThresholds thresholds;  // min_abs_kappa 0.8, deviation_delta 0.1
    std::size_t min_units_per_pair = 10;
    std::size_t bootstrap_samples = 1000;
    double confidence = 0.95;
    std::uint64_t seed = 0;
    TierBoundaries tiers;

    ProfileOptions profile_options() const { return {min_units_per_pair}; }
    void validate() const;
};

/// Overlays the keys present in `text` onto `base`. Unknown keys are an error.
ToolConfig config_from_json(std::string_view text, ToolConfig base = {});

}  // namespace iaa
