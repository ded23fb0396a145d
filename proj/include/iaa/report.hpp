#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iaa/config.hpp"
#include "iaa/difficulty.hpp"
#include "iaa/metrics.hpp"
#include "iaa/workers.hpp"

namespace iaa {

/// Rounds to `places` decimals, ties to even. Negative zero becomes zero.
double round_decimal(double value, int places = 6);

/// Fixed-point text with exactly `places` decimals, ties to even.
std::string format_fixed(double value, int places);

struct ClassMetrics {
    std::string doc_class;
    AgreementProfile profile;
    std::optional<StatisticKind> ci_statistic;
    std::optional<ConfidenceInterval> ci;
};

/// The per-class coefficient table as JSON, classes sorted by doc_class.
std::string emit_metrics_report(std::vector<ClassMetrics> classes, const ToolConfig& config);

enum class ReportFormat { Json, Csv };

std::string emit_worker_report(const WorkerFlagReport& report, ReportFormat format);

struct WorkerScope {
    PairwiseMatrix matrix;
    WorkerFlagReport report;
};

/// Full `workers` payload: one scope per matrix, pooled scope first.
std::string emit_workers_document(const std::vector<WorkerScope>& scopes, const ToolConfig& config);

std::string emit_difficulty_report(const DifficultyRanking& ranking, const std::optional<PilotForecast>& pilot,
                                   const std::vector<std::string>& skipped_classes, const ToolConfig& config);

// ---------------------------------------------------------------------------
// Heatmaps

enum class HeatmapFormat { Svg, Text };

inline constexpr int kHeatmapCellPx = 64;
inline constexpr const char* kHeatmapAbsentColor = "#bdbdbd";

/// Diverging ramp: -1 -> #2166ac, 0 -> #f7f7f7, +1 -> #b2182b, linear per
/// channel, clamped to [-1, 1].
std::string heatmap_color(double value);

/// Two decimals, "–" for absent cells.
std::string heatmap_cell_text(const std::optional<double>& value);

/// `ansi` adds 24-bit background colors to the text form; ignored for SVG.
std::string emit_heatmap(const PairwiseMatrix& matrix, HeatmapFormat format, bool ansi = false);

}  // namespace iaa
