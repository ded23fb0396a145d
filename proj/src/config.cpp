#include "iaa/config.hpp"

#include "json.hpp"

namespace iaa {

void ToolConfig::validate() const {
    auto unit_interval = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, std::string(name) + " must lie in [0, 1]");
        }
    };
    unit_interval(thresholds.min_abs_kappa, "min_abs_kappa");
    unit_interval(thresholds.deviation_delta, "deviation_delta");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "confidence must lie strictly between 0 and 1");
    }
    if (min_units_per_pair < 1) throw Error(ErrorKind::InvalidArgument, "min_units_per_pair must be at least 1");
    if (bootstrap_samples < 100) throw Error(ErrorKind::InvalidArgument, "bootstrap_samples must be at least 100");
    tiers.validate();
}

ToolConfig config_from_json(std::string_view text, ToolConfig base) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
        for (const auto& [key, value] : doc.items()) {
            if (key == "min_abs_kappa") {
                base.thresholds.min_abs_kappa = value.get<double>();
            } else if (key == "deviation_delta") {
                base.thresholds.deviation_delta = value.get<double>();
            } else if (key == "min_units_per_pair") {
                base.min_units_per_pair = value.get<std::size_t>();
            } else if (key == "bootstrap_samples") {
                base.bootstrap_samples = value.get<std::size_t>();
            } else if (key == "confidence") {
                base.confidence = value.get<double>();
            } else if (key == "seed") {
                base.seed = value.get<std::uint64_t>();
            } else if (key == "tier_boundaries") {
                for (const auto& [tier, bound] : value.items()) {
                    if (tier == "easy") {
                        base.tiers.easy = bound.get<double>();
                    } else if (tier == "moderate") {
                        base.tiers.moderate = bound.get<double>();
                    } else if (tier == "hard") {
                        base.tiers.hard = bound.get<double>();
                    } else {
                        throw Error(ErrorKind::InvalidArgument, "unknown tier '" + tier + "'");
                    }
                }
            } else {
                throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed config: ") + e.what());
    }
    base.validate();
    return base;
}

}  // namespace iaa
