#include "lcdr/metrics.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lcdr/errors.hpp"

namespace lcdr {

std::optional<double> MetricsReport::fault_recall() const {
    if (tn + fp == 0) return std::nullopt;
    return static_cast<double>(tn) / static_cast<double>(tn + fp);
}

MetricsReport classification_metrics(std::span<const int> predictions,
                                     std::span<const int> labels) {
    if (predictions.size() != labels.size())
        throw ParameterError("predictions and labels differ in length");
    if (predictions.empty()) throw ParameterError("metrics over empty input");

    MetricsReport r;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool pos = labels[i] == kLabelFdia;
        const bool pred_pos = predictions[i] == kLabelFdia;
        if (pos && pred_pos) ++r.tp;
        else if (pos && !pred_pos) ++r.fn;
        else if (!pos && pred_pos) ++r.fp;
        else ++r.tn;
    }
    r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.total());
    if (r.tp + r.fp > 0)
        r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
    if (r.tp + r.fn > 0)
        r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0)
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    return r;
}

double fooling_rate(std::span<const AttackOutcome> outcomes, std::size_t n_fdias) {
    if (n_fdias == 0) throw ParameterError("fooling_rate over zero FDIA samples");
    std::size_t hits = 0;
    for (const AttackOutcome& o : outcomes)
        if (o.success && o.fooled_model && o.relay_tripped) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(n_fdias);
}

namespace {

using nlohmann::json;

json to_json(const MetricsReport& r) {
    json j;
    j["confusion"] = {{"tp", r.tp}, {"tn", r.tn}, {"fp", r.fp}, {"fn", r.fn}};
    j["accuracy"] = r.accuracy;
    if (r.precision) j["precision"] = *r.precision;
    if (r.recall) j["recall"] = *r.recall;
    if (r.f1) j["f1"] = *r.f1;
    if (r.fooling_rate) j["fooling_rate"] = *r.fooling_rate;
    j["metadata"] = r.metadata;
    return j;
}

std::string csv_opt(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os.precision(17);
    os << *v;
    return os.str();
}

} // namespace

void emit_report(const MetricsReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write report: " + path.string());
    if (format == ReportFormat::Json) {
        os << to_json(report).dump(2) << "\n";
    } else {
        os << metrics_csv_header() << "\n" << metrics_csv_row(report) << "\n";
    }
}

MetricsReport parse_report_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open report: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw IoError("malformed report json: " + std::string(e.what()));
    }
    MetricsReport r;
    r.tp = j.at("confusion").at("tp").get<std::size_t>();
    r.tn = j.at("confusion").at("tn").get<std::size_t>();
    r.fp = j.at("confusion").at("fp").get<std::size_t>();
    r.fn = j.at("confusion").at("fn").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    if (j.contains("precision")) r.precision = j.at("precision").get<double>();
    if (j.contains("recall")) r.recall = j.at("recall").get<double>();
    if (j.contains("f1")) r.f1 = j.at("f1").get<double>();
    if (j.contains("fooling_rate")) r.fooling_rate = j.at("fooling_rate").get<double>();
    for (const auto& [k, v] : j.at("metadata").items())
        r.metadata[k] = v.get<std::string>();
    return r;
}

std::string metrics_csv_header() {
    return "model,dataset,epsilon,iterations,tp,tn,fp,fn,accuracy,precision,recall,f1,"
           "fooling_rate";
}

std::string metrics_csv_row(const MetricsReport& r) {
    auto meta = [&](const char* key) {
        auto it = r.metadata.find(key);
        return it == r.metadata.end() ? std::string() : it->second;
    };
    std::ostringstream os;
    os.precision(17);
    os << meta("model") << ',' << meta("dataset") << ',' << meta("epsilon") << ','
       << meta("iterations") << ',' << r.tp << ',' << r.tn << ',' << r.fp << ',' << r.fn
       << ',' << r.accuracy << ',' << csv_opt(r.precision) << ',' << csv_opt(r.recall)
       << ',' << csv_opt(r.f1) << ',' << csv_opt(r.fooling_rate);
    return os.str();
}

} // namespace lcdr
