#include "iaa/metrics.hpp"

#include <map>
#include <numeric>

#include "metrics_detail.hpp"

namespace iaa {

std::string_view to_string(DegenerateFlag flag) {
    switch (flag) {
    case DegenerateFlag::SingleLabel: return "single_label";
    case DegenerateFlag::InsufficientPairs: return "insufficient_pairs";
    case DegenerateFlag::ChanceIsOne: return "chance_is_one";
    }
    return "unknown";
}

std::string_view to_string(StatisticKind kind) {
    switch (kind) {
    case StatisticKind::Cohen: return "cohen";
    case StatisticKind::Fleiss: return "fleiss";
    case StatisticKind::Alpha: return "alpha";
    }
    return "unknown";
}

namespace detail {

std::vector<std::size_t> all_rows(const ReliabilityData& data) {
    std::vector<std::size_t> rows(data.unit_count());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

ConfusionTable confusion_rows(const ReliabilityData& data, std::size_t a1, std::size_t a2, Rows rows) {
    const std::size_t k = data.label_count();
    ConfusionTable table{data.labels(), std::vector<std::uint64_t>(k * k, 0), 0};
    for (auto u : rows) {
        const auto c1 = data.cell(u, a1);
        const auto c2 = data.cell(u, a2);
        if (!c1 || !c2) continue;
        ++table.counts[*c1 * k + *c2];
        ++table.n_pairable;
    }
    return table;
}

std::optional<FleissParts> fleiss_parts(const ReliabilityData& data, Rows rows) {
    const std::size_t k = data.label_count();
    std::vector<std::uint64_t> unit_counts(k);
    std::vector<std::uint64_t> pooled(k, 0);
    // Agreeing ordered pairs and unit count, grouped by raters-per-unit, so the
    // only inexact step is one division per distinct rater count.
    std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> by_raters;

    FleissParts parts;
    for (auto u : rows) {
        std::fill(unit_counts.begin(), unit_counts.end(), 0);
        std::uint64_t raters = 0;
        for (std::size_t a = 0; a < data.annotator_count(); ++a) {
            if (auto c = data.cell(u, a)) {
                ++unit_counts[*c];
                ++raters;
            }
        }
        if (raters < 2) continue;
        std::uint64_t agreeing = 0;
        for (std::size_t j = 0; j < k; ++j) {
            agreeing += unit_counts[j] * (unit_counts[j] == 0 ? 0 : unit_counts[j] - 1);
            pooled[j] += unit_counts[j];
        }
        auto& [agree_sum, units] = by_raters[raters];
        agree_sum += agreeing;
        ++units;
        ++parts.included_units;
        parts.pooled_total += raters;
    }
    if (parts.included_units == 0) return std::nullopt;

    double sum_p = 0.0;
    for (const auto& [raters, acc] : by_raters) {
        sum_p += static_cast<double>(acc.first) / static_cast<double>(raters * (raters - 1));
    }
    parts.mean_unit_agreement = sum_p / static_cast<double>(parts.included_units);
    for (auto t : pooled) parts.pooled_square_sum += t * t;
    parts.varying_rater_counts = by_raters.size() > 1;
    return parts;
}

Coefficient fleiss_from_parts(const FleissParts& parts) {
    const std::uint64_t n_sq = parts.pooled_total * parts.pooled_total;
    if (parts.pooled_square_sum == n_sq) {
        return {parts.mean_unit_agreement == 1.0 ? 1.0 : 0.0, DegenerateFlag::SingleLabel};
    }
    const double numerator = parts.mean_unit_agreement * static_cast<double>(n_sq) -
                             static_cast<double>(parts.pooled_square_sum);
    const double denominator = static_cast<double>(n_sq - parts.pooled_square_sum);
    return {numerator / denominator, std::nullopt};
}

std::optional<CoincidenceMatrix> coincidence_rows(const ReliabilityData& data, Rows rows) {
    const std::size_t k = data.label_count();
    std::vector<std::uint64_t> unit_counts(k);
    std::vector<std::uint64_t> values(k, 0);
    // Ordered value-pair counts grouped by pairable values per unit (m).
    std::map<std::uint64_t, std::vector<std::uint64_t>> pairs_by_m;

    for (auto u : rows) {
        std::fill(unit_counts.begin(), unit_counts.end(), 0);
        std::uint64_t m = 0;
        for (std::size_t a = 0; a < data.annotator_count(); ++a) {
            if (auto c = data.cell(u, a)) {
                ++unit_counts[*c];
                ++m;
            }
        }
        if (m < 2) continue;
        auto& pairs = pairs_by_m[m];
        if (pairs.empty()) pairs.assign(k * k, 0);
        for (std::size_t c = 0; c < k; ++c) {
            if (unit_counts[c] == 0) continue;
            values[c] += unit_counts[c];
            for (std::size_t d = 0; d < k; ++d) {
                if (unit_counts[d] == 0) continue;
                pairs[c * k + d] += unit_counts[c] * (c == d ? unit_counts[c] - 1 : unit_counts[d]);
            }
        }
    }
    if (pairs_by_m.empty()) return std::nullopt;

    CoincidenceMatrix m{data.labels(), std::vector<double>(k * k, 0.0), values,
                        std::vector<double>(k, 0.0), 0.0};
    for (const auto& [pairable, pairs] : pairs_by_m) {
        const double weight = static_cast<double>(pairable - 1);
        for (std::size_t i = 0; i < k * k; ++i) {
            if (pairs[i] != 0) m.o[i] += static_cast<double>(pairs[i]) / weight;
        }
    }
    std::uint64_t total = 0;
    for (std::size_t c = 0; c < k; ++c) {
        m.n_c[c] = static_cast<double>(values[c]);
        total += values[c];
    }
    m.n = static_cast<double>(total);
    return m;
}

}  // namespace detail

ConfusionTable confusion_table(const ReliabilityData& data, std::string_view a1, std::string_view a2) {
    const auto i = data.annotator_index(a1);
    if (!i) throw Error(ErrorKind::UnknownAnnotator, "unknown annotator '" + std::string(a1) + "'");
    const auto j = data.annotator_index(a2);
    if (!j) throw Error(ErrorKind::UnknownAnnotator, "unknown annotator '" + std::string(a2) + "'");
    return confusion_table(data, *i, *j);
}

ConfusionTable confusion_table(const ReliabilityData& data, std::size_t a1, std::size_t a2) {
    if (a1 >= data.annotator_count() || a2 >= data.annotator_count()) {
        throw Error(ErrorKind::UnknownAnnotator, "annotator index out of range");
    }
    const auto rows = detail::all_rows(data);
    auto table = detail::confusion_rows(data, a1, a2, rows);
    if (table.n_pairable == 0) {
        throw Error(ErrorKind::NoPairableUnits, "annotators '" + data.annotators()[a1] + "' and '" +
                                                    data.annotators()[a2] + "' share no units");
    }
    return table;
}

Coefficient cohen_kappa(const ConfusionTable& table) {
    const std::size_t k = table.labels.size();
    const std::uint64_t n = table.n_pairable;
    std::uint64_t diagonal = 0;
    std::uint64_t chance = 0;  // sum of row_k * col_k
    for (std::size_t r = 0; r < k; ++r) {
        std::uint64_t row = 0;
        std::uint64_t col = 0;
        for (std::size_t c = 0; c < k; ++c) {
            row += table.at(r, c);
            col += table.at(c, r);
        }
        diagonal += table.at(r, r);
        chance += row * col;
    }
    const std::uint64_t n_sq = n * n;
    if (chance == n_sq) {
        return {diagonal == n ? 1.0 : 0.0, DegenerateFlag::ChanceIsOne};
    }
    // (p_o - p_e) / (1 - p_e) scaled by n^2 keeps everything integral.
    const auto numerator = static_cast<std::int64_t>(n * diagonal) - static_cast<std::int64_t>(chance);
    return {static_cast<double>(numerator) / static_cast<double>(n_sq - chance), std::nullopt};
}

Coefficient fleiss_kappa(const ReliabilityData& data) {
    const auto rows = detail::all_rows(data);
    const auto parts = detail::fleiss_parts(data, rows);
    if (!parts) throw Error(ErrorKind::InsufficientPairs, "no unit has two or more labels");
    return detail::fleiss_from_parts(*parts);
}

CoincidenceMatrix coincidence_matrix(const ReliabilityData& data) {
    const auto rows = detail::all_rows(data);
    auto m = detail::coincidence_rows(data, rows);
    if (!m) throw Error(ErrorKind::InsufficientPairs, "no unit has two or more labels");
    return std::move(*m);
}

Coefficient krippendorff_alpha(const CoincidenceMatrix& m) {
    const std::size_t k = m.labels.size();
    double observed = 0.0;  // sum of o_cc
    std::uint64_t total = 0;
    std::uint64_t square_sum = 0;
    std::size_t used_labels = 0;
    for (std::size_t c = 0; c < k; ++c) {
        observed += m.at(c, c);
        total += m.value_counts[c];
        square_sum += m.value_counts[c] * m.value_counts[c];
        if (m.value_counts[c] > 0) ++used_labels;
    }
    const double n = static_cast<double>(total);
    if (used_labels <= 1) {
        return {observed == n ? 1.0 : 0.0, DegenerateFlag::SingleLabel};
    }
    // 1 - D_o / D_e with D_o = (n - sum o_cc) / n, D_e = (n^2 - sum n_c^2) / (n (n - 1)).
    const double ratio = (n - 1.0) * (n - observed) / static_cast<double>(total * total - square_sum);
    return {1.0 - ratio, std::nullopt};
}

AgreementProfile profile(const ReliabilityData& data, const ProfileOptions& options) {
    const auto rows = detail::all_rows(data);
    const auto parts = detail::fleiss_parts(data, rows);
    if (!parts) throw Error(ErrorKind::EmptyDataset, "no unit has two or more labels");

    AgreementProfile p;
    p.n_units = data.unit_count();
    p.n_annotators = data.annotator_count();
    p.n_labels = data.label_count();
    p.percent_agreement = parts->mean_unit_agreement;
    p.varying_rater_counts = parts->varying_rater_counts;

    const auto fleiss = detail::fleiss_from_parts(*parts);
    p.fleiss_kappa = fleiss.value;

    const auto alpha = krippendorff_alpha(*detail::coincidence_rows(data, rows));
    p.krippendorff_alpha = alpha.value;

    const std::size_t min_pairable = data.annotator_count() == 2 ? 1 : options.min_units_per_pair;
    double kappa_sum = 0.0;
    bool chance_is_one = false;
    for (std::size_t i = 0; i < data.annotator_count(); ++i) {
        for (std::size_t j = i + 1; j < data.annotator_count(); ++j) {
            const auto table = detail::confusion_rows(data, i, j, rows);
            if (table.n_pairable == 0 || table.n_pairable < min_pairable) continue;
            const auto kappa = cohen_kappa(table);
            kappa_sum += kappa.value;
            chance_is_one = chance_is_one || kappa.degenerate.has_value();
            ++p.cohen_pairs_used;
        }
    }
    if (p.cohen_pairs_used > 0) {
        p.cohen_kappa = kappa_sum / static_cast<double>(p.cohen_pairs_used);
    } else {
        p.degenerate_flags.insert(DegenerateFlag::InsufficientPairs);
    }

    if (fleiss.degenerate || alpha.degenerate) {
        p.degenerate_flags.insert(DegenerateFlag::SingleLabel);
    } else if (chance_is_one) {
        p.degenerate_flags.insert(DegenerateFlag::ChanceIsOne);
    }
    return p;
}

}  // namespace iaa
