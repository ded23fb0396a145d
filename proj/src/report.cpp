#include "iaa/report.hpp"

#include <algorithm>
#include <cfenv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace iaa {

namespace {

using nlohmann::ordered_json;

constexpr int kReportVersion = 1;

ordered_json number(double v) { return round_decimal(v); }

ordered_json optional_number(const std::optional<double>& v) {
    return v ? number(*v) : ordered_json(nullptr);
}

ordered_json config_echo(const ToolConfig& config) {
    ordered_json echo;
    echo["min_abs_kappa"] = number(config.thresholds.min_abs_kappa);
    echo["deviation_delta"] = number(config.thresholds.deviation_delta);
    echo["min_units_per_pair"] = config.min_units_per_pair;
    echo["bootstrap_samples"] = config.bootstrap_samples;
    echo["confidence"] = number(config.confidence);
    echo["seed"] = config.seed;
    echo["tier_boundaries"] = {{"easy", number(config.tiers.easy)},
                               {"moderate", number(config.tiers.moderate)},
                               {"hard", number(config.tiers.hard)}};
    return echo;
}

ordered_json flags_json(const std::set<DegenerateFlag>& flags) {
    auto out = ordered_json::array();
    for (auto f : flags) out.push_back(to_string(f));
    return out;
}

ordered_json profile_fields(const AgreementProfile& p) {
    ordered_json j;
    j["cohen"] = optional_number(p.cohen_kappa);
    j["fleiss"] = optional_number(p.fleiss_kappa);
    j["alpha"] = optional_number(p.krippendorff_alpha);
    j["percent_agreement"] = number(p.percent_agreement);
    j["n_units"] = p.n_units;
    j["n_annotators"] = p.n_annotators;
    j["n_labels"] = p.n_labels;
    j["cohen_pairs_used"] = p.cohen_pairs_used;
    j["varying_rater_counts"] = p.varying_rater_counts;
    j["degenerate_flags"] = flags_json(p.degenerate_flags);
    return j;
}

ordered_json worker_report_json(const WorkerFlagReport& report) {
    ordered_json j;
    j["doc_class"] = report.doc_class ? ordered_json(*report.doc_class) : ordered_json(nullptr);
    j["thresholds_used"] = {{"min_abs_kappa", number(report.thresholds_used.min_abs_kappa)},
                            {"deviation_delta", number(report.thresholds_used.deviation_delta)}};
    j["group_mean"] = optional_number(report.group_mean);
    j["per_worker"] = ordered_json::array();
    for (const auto& w : report.per_worker) {
        ordered_json row;
        row["annotator_id"] = w.annotator_id;
        row["mean_pairwise_kappa"] = optional_number(w.mean_pairwise_kappa);
        row["n_pairs_used"] = w.n_pairs_used;
        row["peer_mean"] = optional_number(w.peer_mean);
        row["flags"] = ordered_json::array();
        for (auto f : w.flags) row["flags"].push_back(to_string(f));
        row["recommendation"] = to_string(w.recommendation);
        j["per_worker"].push_back(std::move(row));
    }
    return j;
}

ordered_json matrix_json(const PairwiseMatrix& m) {
    ordered_json j;
    j["coefficient"] = PairwiseMatrix::coefficient;
    j["doc_class"] = m.doc_class ? ordered_json(*m.doc_class) : ordered_json(nullptr);
    j["min_units_per_pair"] = m.min_units_per_pair;
    j["annotators"] = m.annotators;
    auto values = ordered_json::array();
    auto pairable = ordered_json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto row = ordered_json::array();
        auto counts = ordered_json::array();
        for (std::size_t j2 = 0; j2 < m.size(); ++j2) {
            row.push_back(optional_number(m.at(i, j2)));
            counts.push_back(i == j2 ? ordered_json(nullptr) : ordered_json(m.pairable_at(i, j2)));
        }
        values.push_back(std::move(row));
        pairable.push_back(std::move(counts));
    }
    j["values"] = std::move(values);
    j["pairable_units"] = std::move(pairable);
    return j;
}

}  // namespace

std::string format_fixed(double value, int places) {
    // printf rounds the exact binary value; genuine ties follow the current
    // rounding mode, which we pin to nearest-even.
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, value);
    std::fesetround(saved);
    std::string out = buf;
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

double round_decimal(double value, int places) {
    const double rounded = std::strtod(format_fixed(value, places).c_str(), nullptr);
    return rounded == 0.0 ? 0.0 : rounded;
}

std::string emit_metrics_report(std::vector<ClassMetrics> classes, const ToolConfig& config) {
    std::sort(classes.begin(), classes.end(),
              [](const ClassMetrics& a, const ClassMetrics& b) { return a.doc_class < b.doc_class; });
    ordered_json doc;
    doc["version"] = kReportVersion;
    doc["config_echo"] = config_echo(config);
    doc["classes"] = ordered_json::array();
    for (const auto& c : classes) {
        ordered_json entry;
        entry["doc_class"] = c.doc_class;
        entry.update(profile_fields(c.profile));
        if (c.ci && c.ci_statistic) {
            entry["ci"] = {{"statistic", to_string(*c.ci_statistic)},
                           {"lower", number(c.ci->lower)},
                           {"upper", number(c.ci->upper)},
                           {"confidence", number(c.ci->confidence)},
                           {"n_resamples", c.ci->n_resamples},
                           {"n_used", c.ci->n_used}};
        }
        doc["classes"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::string emit_worker_report(const WorkerFlagReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) return worker_report_json(report).dump(2) + "\n";

    auto rows = report.per_worker;
    std::sort(rows.begin(), rows.end(),
              [](const WorkerSummary& a, const WorkerSummary& b) { return a.annotator_id < b.annotator_id; });
    std::ostringstream out;
    out << "annotator_id,mean_pairwise_kappa,n_pairs_used,flags,recommendation\n";
    for (const auto& w : rows) {
        std::string flags;
        for (auto f : w.flags) {
            if (!flags.empty()) flags += '|';
            flags += to_string(f);
        }
        const bool needs_quotes = w.annotator_id.find_first_of(",\"\n\r") != std::string::npos;
        std::string id = w.annotator_id;
        if (needs_quotes) {
            std::string quoted = "\"";
            for (char c : id) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            id = quoted + "\"";
        }
        out << id << ',' << (w.mean_pairwise_kappa ? format_fixed(*w.mean_pairwise_kappa, 6) : "") << ','
            << w.n_pairs_used << ',' << flags << ',' << to_string(w.recommendation) << '\n';
    }
    return out.str();
}

std::string emit_workers_document(const std::vector<WorkerScope>& scopes, const ToolConfig& config) {
    ordered_json doc;
    doc["version"] = kReportVersion;
    doc["config_echo"] = config_echo(config);
    doc["pairwise_coefficient"] = PairwiseMatrix::coefficient;
    doc["scopes"] = ordered_json::array();
    bool flagged = false;
    for (const auto& s : scopes) {
        flagged = flagged || s.report.any_flagged();
        doc["scopes"].push_back({{"matrix", matrix_json(s.matrix)}, {"report", worker_report_json(s.report)}});
    }
    doc["any_flagged"] = flagged;
    return doc.dump(2) + "\n";
}

std::string emit_difficulty_report(const DifficultyRanking& ranking, const std::optional<PilotForecast>& pilot,
                                   const std::vector<std::string>& skipped_classes, const ToolConfig& config) {
    ordered_json doc;
    doc["version"] = kReportVersion;
    doc["config_echo"] = config_echo(config);
    doc["ranking_key"] = DifficultyRanking::ranking_key;
    doc["entries"] = ordered_json::array();
    for (const auto& e : ranking.entries) {
        ordered_json entry;
        entry["rank"] = e.rank;
        entry["doc_class"] = e.doc_class;
        entry["tier"] = to_string(e.tier);
        entry.update(profile_fields(e.profile));
        doc["entries"].push_back(std::move(entry));
    }
    auto excluded = ranking.excluded;
    excluded.insert(excluded.end(), skipped_classes.begin(), skipped_classes.end());
    std::sort(excluded.begin(), excluded.end());
    doc["excluded"] = excluded;
    if (pilot) {
        ordered_json p = profile_fields(pilot->pilot_profile);
        p["predicted_tier"] = to_string(pilot->predicted_tier);
        p["nearest_baselines"] = ordered_json::array();
        for (const auto& n : pilot->nearest_baselines) {
            p["nearest_baselines"].push_back({{"doc_class", n.doc_class}, {"alpha_gap", number(n.alpha_gap)}});
        }
        doc["pilot"] = std::move(p);
    }
    return doc.dump(2) + "\n";
}

}  // namespace iaa
