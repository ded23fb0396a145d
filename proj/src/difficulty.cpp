#include "iaa/difficulty.hpp"

#include <algorithm>
#include <cmath>

namespace iaa {

void TierBoundaries::validate() const {
    if (!(easy <= 1.0 && easy > moderate && moderate > hard && hard >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "tier boundaries must satisfy 1 >= easy > moderate > hard >= 0");
    }
}

std::string_view to_string(Tier tier) {
    switch (tier) {
    case Tier::Easy: return "easy";
    case Tier::Moderate: return "moderate";
    case Tier::Hard: return "hard";
    case Tier::VeryHard: return "very_hard";
    }
    return "unknown";
}

Tier tier_for(double alpha, const TierBoundaries& boundaries) {
    if (alpha >= boundaries.easy) return Tier::Easy;
    if (alpha >= boundaries.moderate) return Tier::Moderate;
    if (alpha >= boundaries.hard) return Tier::Hard;
    return Tier::VeryHard;
}

ClassProfiles class_profiles(const ReliabilityData& data, const ProfileOptions& options) {
    ClassProfiles out;
    for (const auto& doc_class : data.doc_classes()) {
        const auto scoped = slice(data, ByDocClass{doc_class});
        try {
            out.profiles.push_back({doc_class, profile(scoped, options)});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyDataset) throw;
            out.skipped.push_back(doc_class);
        }
    }
    return out;
}

DifficultyRanking rank_difficulty(const std::vector<ClassProfile>& profiles, const TierBoundaries& boundaries) {
    boundaries.validate();
    DifficultyRanking ranking;
    for (const auto& p : profiles) {
        if (!p.profile.krippendorff_alpha) {
            ranking.excluded.push_back(p.doc_class);
            continue;
        }
        ranking.entries.push_back({p.doc_class, p.profile, tier_for(*p.profile.krippendorff_alpha, boundaries), 0});
    }
    if (ranking.entries.empty()) throw Error(ErrorKind::NoRankableClasses, "no class has a computable alpha");

    std::sort(ranking.entries.begin(), ranking.entries.end(), [](const RankedClass& a, const RankedClass& b) {
        const double x = *a.profile.krippendorff_alpha;
        const double y = *b.profile.krippendorff_alpha;
        if (x != y) return x > y;
        return a.doc_class < b.doc_class;
    });
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) ranking.entries[i].rank = i + 1;
    std::sort(ranking.excluded.begin(), ranking.excluded.end());
    return ranking;
}

PilotForecast forecast_pilot(const ReliabilityData& pilot, const BaselineRegistry& registry,
                             const TierBoundaries& boundaries, const ProfileOptions& options) {
    boundaries.validate();
    PilotForecast forecast;
    try {
        forecast.pilot_profile = profile(pilot, options);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyDataset) throw;
        throw Error(ErrorKind::InsufficientPairs, "pilot has no unit labeled by two annotators");
    }
    const double alpha = *forecast.pilot_profile.krippendorff_alpha;
    forecast.predicted_tier = tier_for(alpha, boundaries);

    for (const auto& record : registry.records) {
        if (!record.alpha) continue;
        forecast.nearest_baselines.push_back({record.doc_class, alpha - *record.alpha});
    }
    std::sort(forecast.nearest_baselines.begin(), forecast.nearest_baselines.end(),
              [](const BaselineNeighbor& a, const BaselineNeighbor& b) {
                  const double x = std::abs(a.alpha_gap);
                  const double y = std::abs(b.alpha_gap);
                  if (x != y) return x < y;
                  return a.doc_class < b.doc_class;
              });
    return forecast;
}

}  // namespace iaa
