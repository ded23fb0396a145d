#include "iaa/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "iaa/annotation.hpp"
#include "iaa/config.hpp"
#include "iaa/difficulty.hpp"
#include "iaa/report.hpp"
#include "iaa/simulation.hpp"
#include "iaa/workers.hpp"
#include "json.hpp"

namespace iaa::cli {

namespace {

struct CommonOptions {
    std::vector<std::string> inputs;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> labels;
    std::optional<double> min_abs_kappa;
    std::optional<double> deviation_delta;
    std::optional<std::size_t> min_units_per_pair;
    std::optional<std::size_t> bootstrap_samples;
    std::optional<double> confidence;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--in", o.inputs, "Annotation file (repeatable)");
    cmd->add_option("--format", o.format, "Input format; inferred from the extension when omitted")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--out", o.out, "Write the report here instead of standard output");
    cmd->add_option("--config", o.config, "JSON config file");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--labels", o.labels, "File declaring the label set, one label per line");
    cmd->add_option("--min-abs-kappa", o.min_abs_kappa, "Absolute kappa floor for worker flags");
    cmd->add_option("--deviation-delta", o.deviation_delta, "Allowed shortfall below the peer mean");
    cmd->add_option("--min-units-per-pair", o.min_units_per_pair, "Shared units needed for a pairwise kappa");
    cmd->add_option("--bootstrap-samples", o.bootstrap_samples, "Bootstrap resamples");
    cmd->add_option("--confidence", o.confidence, "Bootstrap interval confidence");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ToolConfig resolve_config(const CommonOptions& o) {
    ToolConfig config;
    if (o.config) config = config_from_json(read_file(*o.config));
    if (o.min_abs_kappa) config.thresholds.min_abs_kappa = *o.min_abs_kappa;
    if (o.deviation_delta) config.thresholds.deviation_delta = *o.deviation_delta;
    if (o.min_units_per_pair) config.min_units_per_pair = *o.min_units_per_pair;
    if (o.bootstrap_samples) config.bootstrap_samples = *o.bootstrap_samples;
    if (o.confidence) config.confidence = *o.confidence;
    if (o.seed) config.seed = *o.seed;
    config.validate();
    return config;
}

InputFormat format_for(const CommonOptions& o, const std::string& path) {
    if (o.format) return *parse_input_format(*o.format);
    return path.ends_with(".csv") ? InputFormat::Csv : InputFormat::Jsonl;
}

std::optional<std::vector<std::string>> declared_labels(const CommonOptions& o) {
    if (!o.labels) return std::nullopt;
    std::istringstream in(read_file(*o.labels));
    std::vector<std::string> labels;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) labels.push_back(line);
    }
    return labels;
}

std::vector<AnnotationRecord> read_records(const CommonOptions& o, const std::vector<std::string>& paths) {
    std::vector<AnnotationRecord> all;
    for (const auto& path : paths) {
        std::istringstream in(read_file(path));
        auto outcome = scan_records(in, format_for(o, path));
        if (!outcome.diagnostics.empty()) {
            const auto& d = outcome.diagnostics.front();
            throw Error(d.kind, path + ": " + d.message, d.line, d.previous_line);
        }
        all.insert(all.end(), outcome.records.begin(), outcome.records.end());
    }
    return all;
}

ReliabilityData load_data(const CommonOptions& o, const std::vector<std::string>& paths) {
    if (paths.empty()) throw Error(ErrorKind::InvalidArgument, "no input files; pass --in PATH");
    return build_reliability_matrix(read_records(o, paths), declared_labels(o));
}

void emit(const CommonOptions& o, std::ostream& out, const std::string& payload) {
    if (!o.out) {
        out << payload;
        return;
    }
    std::ofstream file(*o.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::Io, "cannot write '" + *o.out + "'");
    file << payload;
}

void write_text_file(const std::string& path, const std::string& payload) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    file << payload;
}

bool color_enabled() {
    const char* no_color = std::getenv("NO_COLOR");
    return no_color == nullptr || *no_color == '\0';
}

// ---------------------------------------------------------------------------

int cmd_validate(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    if (o.inputs.empty()) throw Error(ErrorKind::InvalidArgument, "no input files; pass --in PATH");
    nlohmann::ordered_json summary;
    auto diagnostics = nlohmann::ordered_json::array();
    std::vector<AnnotationRecord> records;
    for (const auto& path : o.inputs) {
        std::istringstream in(read_file(path));
        auto outcome = scan_records(in, format_for(o, path));
        for (const auto& d : outcome.diagnostics) {
            err << path << ": " << d.message << '\n';
            diagnostics.push_back({{"file", path}, {"line", d.line}, {"kind", to_string(d.kind)}, {"message", d.message}});
        }
        records.insert(records.end(), outcome.records.begin(), outcome.records.end());
    }

    std::optional<ReliabilityData> data;
    if (!records.empty()) {
        try {
            data = build_reliability_matrix(records, declared_labels(o));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Io || e.kind() == ErrorKind::InvalidArgument) throw;
            err << e.what() << '\n';
            diagnostics.push_back({{"file", nullptr}, {"line", nullptr}, {"kind", to_string(e.kind())}, {"message", e.what()}});
        }
    } else if (diagnostics.empty()) {
        err << "no annotation records\n";
        diagnostics.push_back({{"file", nullptr}, {"line", nullptr}, {"kind", "EmptyDataset"}, {"message", "no annotation records"}});
    }

    const bool valid = diagnostics.empty();
    summary["valid"] = valid;
    summary["records"] = records.size();
    summary["units"] = data ? data->unit_count() : 0;
    summary["annotators"] = data ? data->annotator_count() : 0;
    summary["labels"] = data ? data->label_count() : 0;
    summary["doc_classes"] = data ? nlohmann::ordered_json(data->doc_classes()) : nlohmann::ordered_json::array();
    summary["diagnostics"] = std::move(diagnostics);
    emit(o, out, summary.dump(2) + "\n");
    return valid ? kSuccess : kInputError;
}

int cmd_metrics(const CommonOptions& o, const std::string& ci, std::ostream& out, std::ostream& err) {
    const auto config = resolve_config(o);
    const auto data = load_data(o, o.inputs);
    const auto profiles = class_profiles(data, config.profile_options());
    for (const auto& s : profiles.skipped) err << "class '" << s << "' skipped: no unit labeled twice\n";
    if (profiles.profiles.empty()) throw Error(ErrorKind::EmptyDataset, "no class has a unit labeled twice");

    std::vector<ClassMetrics> classes;
    for (const auto& p : profiles.profiles) {
        ClassMetrics entry{p.doc_class, p.profile, std::nullopt, std::nullopt};
        if (ci != "none") {
            const auto stat = ci == "fleiss" ? BootstrapStatistic::fleiss() : BootstrapStatistic::alpha();
            entry.ci_statistic = stat.kind;
            entry.ci = bootstrap_ci(slice(data, ByDocClass{p.doc_class}), stat, config.bootstrap_samples,
                                    config.confidence, config.seed);
        }
        classes.push_back(std::move(entry));
    }
    emit(o, out, emit_metrics_report(std::move(classes), config));
    return kSuccess;
}

struct WorkersOptions {
    std::optional<std::string> doc_class;
    std::optional<std::string> heatmap;
    std::string report_format = "json";
    bool show = false;
};

int cmd_workers(const CommonOptions& o, const WorkersOptions& w, std::ostream& out, std::ostream& err) {
    const auto config = resolve_config(o);
    const auto data = load_data(o, o.inputs);

    std::vector<WorkerScope> scopes;
    auto add_scope = [&](const std::optional<std::string>& doc_class) {
        auto matrix = pairwise_matrix(data, doc_class, config.min_units_per_pair);
        auto report = flag_workers(matrix, config.thresholds);
        scopes.push_back({std::move(matrix), std::move(report)});
    };
    if (w.doc_class) {
        add_scope(w.doc_class);
    } else {
        add_scope(std::nullopt);
        for (const auto& c : data.doc_classes()) add_scope(c);
    }

    const auto& primary = scopes.front();
    if (w.heatmap) {
        const bool svg = w.heatmap->ends_with(".svg");
        write_text_file(*w.heatmap, emit_heatmap(primary.matrix, svg ? HeatmapFormat::Svg : HeatmapFormat::Text));
    }
    if (w.show) err << emit_heatmap(primary.matrix, HeatmapFormat::Text, color_enabled());

    if (w.report_format == "csv") {
        emit(o, out, emit_worker_report(primary.report, ReportFormat::Csv));
    } else {
        emit(o, out, emit_workers_document(scopes, config));
    }

    bool flagged = false;
    for (const auto& s : scopes) {
        for (const auto& row : s.report.per_worker) {
            if (row.recommendation == Recommendation::None) continue;
            flagged = true;
            err << (s.report.doc_class ? *s.report.doc_class : "all classes") << ": " << row.annotator_id
                << " -> " << to_string(row.recommendation) << '\n';
        }
    }
    return flagged ? kFlagged : kSuccess;
}

std::vector<std::string> update_registry(const std::string& path, const ReliabilityData& data,
                                         const ToolConfig& config, std::ostream& err) {
    RegistryLock lock(path);
    auto registry = load_registry(path);
    const auto timestamp = current_timestamp();
    std::vector<std::string> skipped;
    for (const auto& c : data.doc_classes()) {
        try {
            registry = registry_upsert(registry, c, slice(data, ByDocClass{c}), timestamp, config.profile_options());
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientPairs) throw;
            err << "class '" << c << "' not recorded: " << e.what() << '\n';
            skipped.push_back(c);
        }
    }
    save_registry(path, registry);
    return skipped;
}

struct DifficultyOptions {
    std::optional<std::string> registry;
    bool update = false;
    std::vector<std::string> pilot;
};

int cmd_difficulty(const CommonOptions& o, const DifficultyOptions& d, std::ostream& out, std::ostream& err) {
    const auto config = resolve_config(o);
    if (o.inputs.empty() && d.pilot.empty()) {
        throw Error(ErrorKind::InvalidArgument, "difficulty needs --in and/or --pilot");
    }
    if (d.update && !d.registry) throw Error(ErrorKind::InvalidArgument, "--update requires --registry");

    DifficultyRanking ranking;
    std::vector<std::string> skipped;
    if (!o.inputs.empty()) {
        const auto data = load_data(o, o.inputs);
        auto profiles = class_profiles(data, config.profile_options());
        skipped = profiles.skipped;
        for (const auto& s : skipped) err << "class '" << s << "' skipped: no unit labeled twice\n";
        ranking = rank_difficulty(profiles.profiles, config.tiers);
        if (d.update) update_registry(*d.registry, data, config, err);
    }

    std::optional<PilotForecast> forecast;
    if (!d.pilot.empty()) {
        const auto pilot = load_data(o, d.pilot);
        const auto registry = d.registry ? load_registry(*d.registry) : BaselineRegistry{};
        forecast = forecast_pilot(pilot, registry, config.tiers, config.profile_options());
    }
    emit(o, out, emit_difficulty_report(ranking, forecast, skipped, config));

    if (forecast && (forecast->predicted_tier == Tier::Hard || forecast->predicted_tier == Tier::VeryHard)) {
        err << "pilot predicted tier: " << to_string(forecast->predicted_tier) << '\n';
        return kFlagged;
    }
    return kSuccess;
}

int cmd_baseline(const CommonOptions& o, const std::string& registry_path, std::ostream& out, std::ostream& err) {
    const auto config = resolve_config(o);
    if (!o.inputs.empty()) update_registry(registry_path, load_data(o, o.inputs), config, err);
    emit(o, out, registry_to_json(load_registry(registry_path)));
    return kSuccess;
}

struct SimulateOptions {
    std::optional<std::string> spec;
    std::optional<std::size_t> n_units;
    std::optional<std::size_t> n_labels;
    std::vector<double> error_rates;
    std::optional<double> coverage;
    std::optional<std::string> doc_class;
};

int cmd_simulate(const CommonOptions& o, const SimulateOptions& s, std::ostream& out) {
    SimulationSpec spec = s.spec ? simulation_spec_from_json(read_file(*s.spec)) : SimulationSpec{};
    if (s.n_units) spec.n_units = *s.n_units;
    if (s.n_labels) spec.n_labels = *s.n_labels;
    if (!s.error_rates.empty()) spec.worker_error_rates = s.error_rates;
    if (s.coverage) spec.coverage = *s.coverage;
    if (s.doc_class) spec.doc_class = *s.doc_class;
    if (o.seed) spec.seed = *o.seed;
    const auto result = generate(spec);
    const auto format = o.format ? *parse_input_format(*o.format)
                        : o.out && o.out->ends_with(".csv") ? InputFormat::Csv
                                                            : InputFormat::Jsonl;
    emit(o, out, serialize_records(result.data.to_records(), format));
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inter-annotator agreement analytics for labeling pipelines", "iaa"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* validate = app.add_subcommand("validate", "Check annotation files against the input schema");
    add_common(validate, common);

    std::string ci = "none";
    auto* metrics = app.add_subcommand("metrics", "Per-class agreement coefficients");
    add_common(metrics, common);
    metrics->add_option("--ci", ci, "Attach a bootstrap interval for this statistic")
        ->check(CLI::IsMember({"none", "alpha", "fleiss"}));

    WorkersOptions worker_opts;
    auto* workers = app.add_subcommand("workers", "Pairwise kappa matrices and worker flags");
    add_common(workers, common);
    workers->add_option("--class", worker_opts.doc_class, "Restrict to one document class");
    workers->add_option("--heatmap", worker_opts.heatmap, "Write a heatmap (.svg, otherwise text)");
    workers->add_option("--report-format", worker_opts.report_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    workers->add_flag("--show", worker_opts.show, "Print a text heatmap to standard error");

    DifficultyOptions difficulty_opts;
    auto* difficulty = app.add_subcommand("difficulty", "Rank document classes by agreement");
    add_common(difficulty, common);
    difficulty->add_option("--registry", difficulty_opts.registry, "Baseline registry file");
    difficulty->add_flag("--update", difficulty_opts.update, "Record the input classes in the registry");
    difficulty->add_option("--pilot", difficulty_opts.pilot, "Pilot batch to forecast (repeatable)");

    std::string registry_path;
    auto* baseline = app.add_subcommand("baseline", "Show or update the baseline registry");
    add_common(baseline, common);
    baseline->add_option("--registry", registry_path, "Baseline registry file")->required();

    SimulateOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic annotation dataset");
    add_common(simulate, common);
    simulate->add_option("--spec", sim_opts.spec, "JSON simulation spec");
    simulate->add_option("--n-units", sim_opts.n_units, "Units to generate");
    simulate->add_option("--n-labels", sim_opts.n_labels, "Label count");
    simulate->add_option("--error-rates", sim_opts.error_rates, "Per-worker error rates")->delimiter(',');
    simulate->add_option("--coverage", sim_opts.coverage, "Probability a worker labels a unit");
    simulate->add_option("--doc-class", sim_opts.doc_class, "Document class for generated units");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kInputError;
    }

    try {
        if (validate->parsed()) return cmd_validate(common, out, err);
        if (metrics->parsed()) return cmd_metrics(common, ci, out, err);
        if (workers->parsed()) return cmd_workers(common, worker_opts, out, err);
        if (difficulty->parsed()) return cmd_difficulty(common, difficulty_opts, out, err);
        if (baseline->parsed()) return cmd_baseline(common, registry_path, out, err);
        if (simulate->parsed()) return cmd_simulate(common, sim_opts, out);
    } catch (const Error& e) {
        err << "error: " << e.what();
        if (e.line() && std::string_view(e.what()).find("line ") == std::string_view::npos) {
            err << " (line " << *e.line() << ')';
        }
        err << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace iaa::cli
