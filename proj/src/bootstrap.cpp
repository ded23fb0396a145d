#include <algorithm>
#include <cmath>

#include "iaa/metrics.hpp"
#include "metrics_detail.hpp"
#include "random.hpp"

namespace iaa {

namespace {

struct StatisticEvaluator {
    const ReliabilityData& data;
    StatisticKind kind;
    std::size_t a1 = 0;
    std::size_t a2 = 0;

    std::optional<double> operator()(detail::Rows rows) const {
        switch (kind) {
        case StatisticKind::Cohen: {
            const auto table = detail::confusion_rows(data, a1, a2, rows);
            if (table.n_pairable == 0) return std::nullopt;
            return cohen_kappa(table).value;
        }
        case StatisticKind::Fleiss: {
            const auto parts = detail::fleiss_parts(data, rows);
            if (!parts) return std::nullopt;
            return detail::fleiss_from_parts(*parts).value;
        }
        case StatisticKind::Alpha: {
            const auto m = detail::coincidence_rows(data, rows);
            if (!m) return std::nullopt;
            return krippendorff_alpha(*m).value;
        }
        }
        return std::nullopt;
    }
};

// Linear interpolation between closest ranks.
double quantile(const std::vector<double>& sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

ConfidenceInterval bootstrap_ci(const ReliabilityData& data, const BootstrapStatistic& statistic,
                                std::size_t n_resamples, double confidence, std::uint64_t seed) {
    if (n_resamples < 100) throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least 100 resamples");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "confidence must lie strictly between 0 and 1");
    }

    StatisticEvaluator evaluate{data, statistic.kind};
    if (statistic.kind == StatisticKind::Cohen) {
        const auto i = data.annotator_index(statistic.a1);
        const auto j = data.annotator_index(statistic.a2);
        if (!i || !j) throw Error(ErrorKind::UnknownAnnotator, "unknown annotator in cohen statistic");
        evaluate.a1 = *i;
        evaluate.a2 = *j;
    }
    if (!evaluate(detail::all_rows(data))) {
        throw Error(ErrorKind::InsufficientPairs,
                    std::string(to_string(statistic.kind)) + " is not computable on the full data");
    }

    const std::size_t n_units = data.unit_count();
    std::vector<std::size_t> rows(n_units);
    std::vector<double> values;
    values.reserve(n_resamples);
    for (std::size_t r = 0; r < n_resamples; ++r) {
        auto engine = detail::make_engine(seed, r);
        for (auto& row : rows) row = static_cast<std::size_t>(detail::uniform_index(engine, n_units));
        if (auto v = evaluate(rows)) values.push_back(*v);
    }
    if (values.empty()) throw Error(ErrorKind::InsufficientPairs, "no resample was computable");

    std::sort(values.begin(), values.end());
    const double tail = (1.0 - confidence) / 2.0;
    return {quantile(values, tail), quantile(values, 1.0 - tail), confidence, n_resamples, values.size()};
}

}  // namespace iaa
