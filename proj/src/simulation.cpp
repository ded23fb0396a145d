#include "iaa/simulation.hpp"

#include <cmath>
#include <numeric>

#include "json.hpp"
#include "random.hpp"

namespace iaa {

namespace {

std::string padded(std::string_view prefix, std::size_t value, std::size_t count) {
    const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
    std::string digits = std::to_string(value);
    return std::string(prefix) + std::string(width - digits.size(), '0') + digits;
}

std::uint32_t draw_truth(std::mt19937_64& engine, const SimulationSpec& spec) {
    if (!spec.true_label_distribution) {
        return static_cast<std::uint32_t>(detail::uniform_index(engine, spec.n_labels));
    }
    const auto& p = *spec.true_label_distribution;
    const double u = detail::uniform_unit(engine);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cumulative += p[i];
        if (u < cumulative) return static_cast<std::uint32_t>(i);
    }
    // Rounding left u above the final cumulative sum; take the last label with mass.
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i] > 0.0) return static_cast<std::uint32_t>(i);
    }
    return 0;
}

}  // namespace

void SimulationSpec::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
    if (n_units < 1) fail("n_units must be at least 1");
    if (n_labels < 2) fail("n_labels must be at least 2");
    if (worker_error_rates.size() < 2) fail("at least two workers are required");
    for (double e : worker_error_rates) {
        if (!(e >= 0.0 && e <= 1.0)) fail("worker error rates must lie in [0, 1]");
    }
    if (!(coverage > 0.0 && coverage <= 1.0)) fail("coverage must lie in (0, 1]");
    if (doc_class.empty()) fail("doc_class must be non-empty");
    if (true_label_distribution) {
        const auto& p = *true_label_distribution;
        if (p.size() != n_labels) fail("true_label_distribution must have n_labels entries");
        for (double x : p) {
            if (!(x >= 0.0)) fail("probabilities must be non-negative");
        }
        if (std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) > 1e-12) {
            fail("true_label_distribution must sum to 1");
        }
    }
}

SimulationSpec simulation_spec_from_json(std::string_view text) {
    SimulationSpec spec;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "simulation spec must be a JSON object");
        for (const auto& [key, value] : doc.items()) {
            if (key == "n_units") {
                spec.n_units = value.get<std::size_t>();
            } else if (key == "n_labels") {
                spec.n_labels = value.get<std::size_t>();
            } else if (key == "worker_error_rates") {
                spec.worker_error_rates = value.get<std::vector<double>>();
            } else if (key == "coverage") {
                spec.coverage = value.get<double>();
            } else if (key == "true_label_distribution") {
                if (value.is_string() && value.get<std::string>() == "uniform") {
                    spec.true_label_distribution.reset();
                } else {
                    spec.true_label_distribution = value.get<std::vector<double>>();
                }
            } else if (key == "seed") {
                spec.seed = value.get<std::uint64_t>();
            } else if (key == "doc_class") {
                spec.doc_class = value.get<std::string>();
            } else {
                throw Error(ErrorKind::InvalidArgument, "unknown simulation spec key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed simulation spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

SimulatedDataset generate(const SimulationSpec& spec) {
    spec.validate();
    const std::size_t n_workers = spec.worker_error_rates.size();
    const std::size_t k = spec.n_labels;

    std::vector<std::string> labels;
    for (std::size_t c = 0; c < k; ++c) labels.push_back(padded("c", c, k));
    std::vector<std::string> annotators;
    for (std::size_t w = 0; w < n_workers; ++w) annotators.push_back(padded("w", w + 1, n_workers + 1));

    auto truth_engine = detail::make_engine(spec.seed, 0);
    std::vector<std::mt19937_64> label_engines;
    std::vector<std::mt19937_64> coverage_engines;
    for (std::size_t w = 0; w < n_workers; ++w) {
        label_engines.push_back(detail::make_engine(spec.seed, 1 + 2 * w));
        coverage_engines.push_back(detail::make_engine(spec.seed, 2 + 2 * w));
    }

    std::vector<UnitKey> units;
    std::vector<Cell> cells;
    std::vector<std::uint32_t> truth;
    std::vector<Cell> row(n_workers);
    for (std::size_t u = 0; u < spec.n_units; ++u) {
        const std::uint32_t t = draw_truth(truth_engine, spec);
        bool any = false;
        for (std::size_t w = 0; w < n_workers; ++w) {
            auto label = t;
            if (detail::uniform_unit(label_engines[w]) < spec.worker_error_rates[w]) {
                const auto offset = 1 + detail::uniform_index(label_engines[w], k - 1);
                label = static_cast<std::uint32_t>((t + offset) % k);
            }
            const bool covered = spec.coverage >= 1.0 || detail::uniform_unit(coverage_engines[w]) < spec.coverage;
            row[w] = covered ? Cell(label) : std::nullopt;
            any = any || covered;
        }
        if (!any) continue;
        units.push_back({spec.doc_class, "sim", padded("u", u, spec.n_units)});
        cells.insert(cells.end(), row.begin(), row.end());
        truth.push_back(t);
    }
    if (units.empty()) throw Error(ErrorKind::EmptyDataset, "simulation produced no labeled units");

    return {ReliabilityData(std::move(units), std::move(annotators), LabelSpace::declared(std::move(labels)),
                            std::move(cells)),
            std::move(truth)};
}

}  // namespace iaa
