#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iaa/annotation.hpp"
#include "iaa/metrics.hpp"

namespace iaa {

struct SimulationSpec {
    std::size_t n_units = 1000;
    std::size_t n_labels = 5;
    std::vector<double> worker_error_rates{0.1, 0.1, 0.1};
    double coverage = 1.0;  // probability a worker labels a given unit
    std::optional<std::vector<double>> true_label_distribution;  // nullopt = uniform
    std::uint64_t seed = 0;
    std::string doc_class = "sim";

    void validate() const;
};

/// Keys mirror the struct fields; true_label_distribution is "uniform" or an
/// array of probabilities. Missing keys keep their defaults.
SimulationSpec simulation_spec_from_json(std::string_view text);

struct SimulatedDataset {
    ReliabilityData data;
    std::vector<std::uint32_t> truth;  // true label index per unit of `data`
};

/// Each worker copies the true label with probability 1 - error rate and
/// otherwise picks one of the other labels uniformly. Truth, labels and
/// coverage come from separate streams, so lowering coverage only removes
/// cells. Units nobody labeled are dropped.
SimulatedDataset generate(const SimulationSpec& spec);

/// Definition-level recomputation of profile(): explicit per-unit pair
/// loops and marginal sums, no shared code with the metric kernels.
AgreementProfile reference_metrics(const ReliabilityData& data, const ProfileOptions& options = {});

}  // namespace iaa
