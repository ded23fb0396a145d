#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iaa/annotation.hpp"
#include "iaa/metrics.hpp"

namespace iaa {

/// Lower alpha bounds for each tier; anything under `hard` is very_hard.
struct TierBoundaries {
    double easy = 0.9;
    double moderate = 0.8;
    double hard = 0.667;

    /// Throws InvalidArgument unless 1 >= easy > moderate > hard >= 0.
    void validate() const;
};

enum class Tier { Easy, Moderate, Hard, VeryHard };

std::string_view to_string(Tier tier);
Tier tier_for(double alpha, const TierBoundaries& boundaries = {});

struct ClassProfile {
    std::string doc_class;
    AgreementProfile profile;
};

struct ClassProfiles {
    std::vector<ClassProfile> profiles;  // sorted by doc_class
    std::vector<std::string> skipped;    // classes with no unit labeled twice
};

ClassProfiles class_profiles(const ReliabilityData& data, const ProfileOptions& options = {});

struct RankedClass {
    std::string doc_class;
    AgreementProfile profile;
    Tier tier = Tier::Easy;
    std::size_t rank = 0;  // 1 = highest agreement
};

struct DifficultyRanking {
    std::vector<RankedClass> entries;
    std::vector<std::string> excluded;  // classes without an alpha
    static constexpr std::string_view ranking_key = "alpha";
};

/// Descending alpha, ties broken by doc_class.
DifficultyRanking rank_difficulty(const std::vector<ClassProfile>& profiles,
                                  const TierBoundaries& boundaries = {});

// ---------------------------------------------------------------------------
// Baseline registry

struct BaselineRecord {
    std::string doc_class;
    std::optional<double> alpha;
    std::optional<double> cohen;
    std::optional<double> fleiss;
    double percent_agreement = 0.0;
    std::size_t n_units = 0;
    std::size_t n_annotators = 0;
    std::string recorded_at;     // ISO-8601 UTC
    std::string dataset_digest;  // lowercase hex SHA-256

    bool operator==(const BaselineRecord&) const = default;
};

struct BaselineRegistry {
    std::vector<BaselineRecord> records;  // unique doc_class, sorted

    const BaselineRecord* find(std::string_view doc_class) const;
    bool operator==(const BaselineRegistry&) const = default;
};

/// SHA-256 over the data's present cells, one JSON array per record in
/// sorted order.
std::string dataset_digest(const ReliabilityData& data);

/// Current UTC time, or SOURCE_DATE_EPOCH when that variable is set.
std::string current_timestamp();

/// Returns a new registry with the class inserted or replaced. Throws
/// InsufficientPairs (leaving `registry` untouched) when alpha is not
/// computable.
BaselineRegistry registry_upsert(const BaselineRegistry& registry, const std::string& doc_class,
                                 const ReliabilityData& data, const std::string& recorded_at,
                                 const ProfileOptions& options = {});

std::string registry_to_json(const BaselineRegistry& registry);
BaselineRegistry registry_from_json(std::string_view text);

/// A missing file reads as an empty registry.
BaselineRegistry load_registry(const std::filesystem::path& path);
/// Writes a temporary sibling and renames it over `path`.
void save_registry(const std::filesystem::path& path, const BaselineRegistry& registry);

/// Exclusive advisory lock on `<path>.lock` for the lifetime of the object.
class RegistryLock {
public:
    explicit RegistryLock(const std::filesystem::path& registry_path);
    ~RegistryLock();
    RegistryLock(const RegistryLock&) = delete;
    RegistryLock& operator=(const RegistryLock&) = delete;

private:
    int fd_ = -1;
};

struct BaselineNeighbor {
    std::string doc_class;
    double alpha_gap = 0.0;  // pilot alpha minus baseline alpha
};

struct PilotForecast {
    AgreementProfile pilot_profile;
    std::vector<BaselineNeighbor> nearest_baselines;  // by |alpha_gap|, then doc_class
    Tier predicted_tier = Tier::Easy;
};

PilotForecast forecast_pilot(const ReliabilityData& pilot, const BaselineRegistry& registry,
                             const TierBoundaries& boundaries = {}, const ProfileOptions& options = {});

}  // namespace iaa
