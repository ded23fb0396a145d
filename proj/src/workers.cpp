#include "iaa/workers.hpp"

#include <algorithm>

#include "iaa/metrics.hpp"
#include "metrics_detail.hpp"

namespace iaa {

std::string_view to_string(WorkerFlag flag) {
    switch (flag) {
    case WorkerFlag::BelowAbsolute: return "below_absolute";
    case WorkerFlag::BelowDeviation: return "below_deviation";
    case WorkerFlag::InsufficientData: return "insufficient_data";
    }
    return "unknown";
}

std::string_view to_string(Recommendation rec) {
    switch (rec) {
    case Recommendation::None: return "none";
    case Recommendation::Retrain: return "retrain";
    case Recommendation::Rework: return "rework";
    }
    return "unknown";
}

bool WorkerFlagReport::any_flagged() const {
    return std::any_of(per_worker.begin(), per_worker.end(), [](const WorkerSummary& w) {
        return w.flags.contains(WorkerFlag::BelowAbsolute) || w.flags.contains(WorkerFlag::BelowDeviation);
    });
}

PairwiseMatrix pairwise_matrix(const ReliabilityData& data, const std::optional<std::string>& doc_class,
                               std::size_t min_units_per_pair) {
    const ReliabilityData scoped = doc_class ? slice(data, ByDocClass{*doc_class}) : data;
    const std::size_t n = scoped.annotator_count();
    if (n < 2) throw Error(ErrorKind::FewerThanTwoAnnotators, "pairwise matrix needs two annotators");

    PairwiseMatrix m;
    m.annotators = scoped.annotators();
    m.values.assign(n * n, std::nullopt);
    m.pairable.assign(n * n, 0);
    m.doc_class = doc_class;
    m.min_units_per_pair = min_units_per_pair;

    const auto rows = detail::all_rows(scoped);
    const std::size_t needed = std::max<std::size_t>(1, min_units_per_pair);
    for (std::size_t i = 0; i < n; ++i) {
        m.values[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto table = detail::confusion_rows(scoped, i, j, rows);
            m.pairable[i * n + j] = m.pairable[j * n + i] = table.n_pairable;
            if (table.n_pairable < needed) continue;
            const double kappa = cohen_kappa(table).value;
            m.values[i * n + j] = m.values[j * n + i] = kappa;
        }
    }
    return m;
}

WorkerFlagReport flag_workers(const PairwiseMatrix& matrix, const FlagThresholds& thresholds) {
    const std::size_t n = matrix.size();
    WorkerFlagReport report;
    report.thresholds_used = thresholds;
    report.doc_class = matrix.doc_class;

    std::vector<WorkerSummary> workers(n);
    double mean_sum = 0.0;
    std::size_t mean_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& w = workers[i];
        w.annotator_id = matrix.annotators[i];
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (auto v = matrix.at(i, j)) {
                sum += *v;
                ++w.n_pairs_used;
            }
        }
        if (w.n_pairs_used > 0) {
            w.mean_pairwise_kappa = sum / static_cast<double>(w.n_pairs_used);
            mean_sum += *w.mean_pairwise_kappa;
            ++mean_count;
        }
    }
    if (mean_count > 0) report.group_mean = mean_sum / static_cast<double>(mean_count);

    for (auto& w : workers) {
        if (!w.mean_pairwise_kappa) {
            w.flags.insert(WorkerFlag::InsufficientData);
            continue;
        }
        const double mean = *w.mean_pairwise_kappa;
        if (mean_count > 1) {
            w.peer_mean = (mean_sum - mean) / static_cast<double>(mean_count - 1);
        }
        if (mean < thresholds.min_abs_kappa) w.flags.insert(WorkerFlag::BelowAbsolute);
        if (w.peer_mean && mean < *w.peer_mean - thresholds.deviation_delta) {
            w.flags.insert(WorkerFlag::BelowDeviation);
        }
        const bool low = w.flags.contains(WorkerFlag::BelowAbsolute);
        const bool deviant = w.flags.contains(WorkerFlag::BelowDeviation);
        w.recommendation = low && deviant ? Recommendation::Rework
                           : low || deviant ? Recommendation::Retrain
                                            : Recommendation::None;
    }
    std::sort(workers.begin(), workers.end(),
              [](const WorkerSummary& a, const WorkerSummary& b) { return a.annotator_id < b.annotator_id; });
    report.per_worker = std::move(workers);
    return report;
}

std::vector<ClassAgreement> class_summary(const ReliabilityData& data, std::size_t min_units_per_pair) {
    std::vector<ClassAgreement> out;
    for (const auto& doc_class : data.doc_classes()) {
        ClassAgreement entry{doc_class, std::nullopt};
        if (data.annotator_count() >= 2) {
            const auto m = pairwise_matrix(data, doc_class, min_units_per_pair);
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                for (std::size_t j = i + 1; j < m.size(); ++j) {
                    if (auto v = m.at(i, j)) {
                        sum += *v;
                        ++count;
                    }
                }
            }
            if (count > 0) entry.mean_pairwise = sum / static_cast<double>(count);
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace iaa
