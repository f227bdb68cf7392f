#ifndef LCDR_METRICS_HPP
#define LCDR_METRICS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "lcdr/attack.hpp"

namespace lcdr {

/// Confusion counts and derived scores with FDIA as the positive class.
/// Ratios with a zero denominator are reported as absent, not zero.
struct MetricsReport {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> fooling_rate; ///< percent, set for adversarial sets
    std::map<std::string, std::string> metadata;

    std::size_t total() const { return tp + tn + fp + fn; }
    /// Recall of the fault (negative) class.
    std::optional<double> fault_recall() const;
};

MetricsReport classification_metrics(std::span<const int> predictions,
                                     std::span<const int> labels);

/// FR (%) = 100 * (dual-criterion successes) / n_fdias.
double fooling_rate(std::span<const AttackOutcome> outcomes, std::size_t n_fdias);

enum class ReportFormat { Json, Csv };

void emit_report(const MetricsReport& report, const std::filesystem::path& path,
                 ReportFormat format);
MetricsReport parse_report_json(const std::filesystem::path& path);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);

} // namespace lcdr

#endif
