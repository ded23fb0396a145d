// Naive reference implementations used as a correctness oracle for the
// metric kernels. Everything here follows the textbook definitions literally.

#include <set>

#include "iaa/simulation.hpp"

namespace iaa {

namespace {

struct UnitValues {
    std::vector<std::uint32_t> values;
};

std::vector<UnitValues> pairable_units(const ReliabilityData& data) {
    std::vector<UnitValues> out;
    for (std::size_t u = 0; u < data.unit_count(); ++u) {
        UnitValues unit;
        for (std::size_t a = 0; a < data.annotator_count(); ++a) {
            if (auto c = data.cell(u, a)) unit.values.push_back(*c);
        }
        if (unit.values.size() >= 2) out.push_back(std::move(unit));
    }
    return out;
}

double naive_percent_agreement(const std::vector<UnitValues>& units) {
    double total = 0.0;
    for (const auto& unit : units) {
        const auto& v = unit.values;
        double agree = 0.0;
        double pairs = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (i == j) continue;
                pairs += 1.0;
                if (v[i] == v[j]) agree += 1.0;
            }
        }
        total += agree / pairs;
    }
    return total / static_cast<double>(units.size());
}

struct NaiveKappa {
    double value;
    bool chance_is_one;
};

NaiveKappa naive_cohen(const ReliabilityData& data, std::size_t a1, std::size_t a2, std::size_t& n_out) {
    const std::size_t k = data.label_count();
    std::vector<double> marg1(k, 0.0);
    std::vector<double> marg2(k, 0.0);
    double n = 0.0;
    double agree = 0.0;
    for (std::size_t u = 0; u < data.unit_count(); ++u) {
        const auto x = data.cell(u, a1);
        const auto y = data.cell(u, a2);
        if (!x || !y) continue;
        n += 1.0;
        marg1[*x] += 1.0;
        marg2[*y] += 1.0;
        if (*x == *y) agree += 1.0;
    }
    n_out = static_cast<std::size_t>(n);
    if (n == 0.0) return {0.0, false};
    const double p_o = agree / n;
    double p_e = 0.0;
    bool concentrated = false;
    for (std::size_t c = 0; c < k; ++c) {
        p_e += (marg1[c] / n) * (marg2[c] / n);
        if (marg1[c] == n && marg2[c] == n) concentrated = true;
    }
    if (concentrated) return {p_o == 1.0 ? 1.0 : 0.0, true};
    return {(p_o - p_e) / (1.0 - p_e), false};
}

struct NaiveFleiss {
    double value;
    bool single_label;
    bool varying;
};

NaiveFleiss naive_fleiss(const std::vector<UnitValues>& units, std::size_t k) {
    std::vector<double> label_totals(k, 0.0);
    double all_ratings = 0.0;
    double sum_p = 0.0;
    std::set<std::size_t> rater_counts;
    for (const auto& unit : units) {
        std::vector<double> n_ij(k, 0.0);
        for (auto v : unit.values) n_ij[v] += 1.0;
        const double r = static_cast<double>(unit.values.size());
        rater_counts.insert(unit.values.size());
        double squares = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            squares += n_ij[j] * n_ij[j];
            label_totals[j] += n_ij[j];
        }
        all_ratings += r;
        sum_p += (squares - r) / (r * (r - 1.0));
    }
    const double p_bar = sum_p / static_cast<double>(units.size());
    double p_e = 0.0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const double p_j = label_totals[j] / all_ratings;
        p_e += p_j * p_j;
        if (label_totals[j] > 0.0) ++used;
    }
    const bool varying = rater_counts.size() > 1;
    if (used <= 1) return {p_bar == 1.0 ? 1.0 : 0.0, true, varying};
    return {(p_bar - p_e) / (1.0 - p_e), false, varying};
}

struct NaiveAlpha {
    double value;
    bool single_label;
};

NaiveAlpha naive_alpha(const std::vector<UnitValues>& units) {
    // Observed disagreement: pairs within a unit, each weighted 1 / (m_u - 1).
    double n = 0.0;
    double observed = 0.0;
    std::vector<std::uint32_t> pooled;
    for (const auto& unit : units) {
        const auto& v = unit.values;
        const double m = static_cast<double>(v.size());
        n += m;
        for (std::size_t i = 0; i < v.size(); ++i) {
            pooled.push_back(v[i]);
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (i != j && v[i] != v[j]) observed += 1.0 / (m - 1.0);
            }
        }
    }
    // Expected disagreement: every ordered pair of distinct pooled values.
    double expected = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        for (std::size_t j = 0; j < pooled.size(); ++j) {
            if (i != j && pooled[i] != pooled[j]) expected += 1.0;
        }
    }
    const double d_o = observed / n;
    const double d_e = expected / (n * (n - 1.0));
    if (expected == 0.0) return {d_o == 0.0 ? 1.0 : 0.0, true};
    return {1.0 - d_o / d_e, false};
}

}  // namespace

AgreementProfile reference_metrics(const ReliabilityData& data, const ProfileOptions& options) {
    const auto units = pairable_units(data);
    if (units.empty()) throw Error(ErrorKind::EmptyDataset, "no unit has two or more labels");

    AgreementProfile p;
    p.n_units = data.unit_count();
    p.n_annotators = data.annotator_count();
    p.n_labels = data.label_count();
    p.percent_agreement = naive_percent_agreement(units);

    const auto fleiss = naive_fleiss(units, data.label_count());
    p.fleiss_kappa = fleiss.value;
    p.varying_rater_counts = fleiss.varying;
    const auto alpha = naive_alpha(units);
    p.krippendorff_alpha = alpha.value;

    const std::size_t needed = data.annotator_count() == 2 ? 1 : options.min_units_per_pair;
    double sum = 0.0;
    bool chance_is_one = false;
    for (std::size_t i = 0; i < data.annotator_count(); ++i) {
        for (std::size_t j = i + 1; j < data.annotator_count(); ++j) {
            std::size_t n = 0;
            const auto kappa = naive_cohen(data, i, j, n);
            if (n == 0 || n < needed) continue;
            sum += kappa.value;
            chance_is_one = chance_is_one || kappa.chance_is_one;
            ++p.cohen_pairs_used;
        }
    }
    if (p.cohen_pairs_used > 0) {
        p.cohen_kappa = sum / static_cast<double>(p.cohen_pairs_used);
    } else {
        p.degenerate_flags.insert(DegenerateFlag::InsufficientPairs);
    }
    if (fleiss.single_label || alpha.single_label) {
        p.degenerate_flags.insert(DegenerateFlag::SingleLabel);
    } else if (chance_is_one) {
        p.degenerate_flags.insert(DegenerateFlag::ChanceIsOne);
    }
    return p;
}

}  // namespace iaa
