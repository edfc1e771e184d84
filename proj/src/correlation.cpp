#include <algorithm>
#include <cmath>

#include "gainprint/analysis.hpp"
#include "json.hpp"

namespace gainprint::analysis {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("pearson: series differ in length");
    if (x.size() < 3) throw DomainError("pearson: need at least 3 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Relative threshold: a constant series can leave rounding residue.
    const auto flat = [&](double ss, double mean) { return ss <= 1e-24 * std::max(1.0, mean * mean) * n; };
    if (flat(sxx, mx)) throw UndefinedCorrelationError("pearson: first series has zero variance");
    if (flat(syy, my)) throw UndefinedCorrelationError("pearson: second series has zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult gain_power_correlation(const audio::PowerSeries& power,
                                         std::span<const telemetry::TelemetryRecord> records) {
    if (power.size() != records.size())
        throw DomainError("correlation: " + std::to_string(power.size()) + " power windows vs " +
                          std::to_string(records.size()) + " telemetry records");
    std::vector<double> mean_gain, min_gain;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].minute_index != i) throw DomainError("correlation: records are not aligned minute by minute");
        mean_gain.push_back(records[i].mean_gain);
        min_gain.push_back(records[i].min_gain);
    }
    CorrelationResult r;
    r.points = records.size();
    r.r_mean = pearson(power.mean_frame_dbfs, mean_gain);
    r.r_min = pearson(power.max_frame_dbfs, min_gain);
    try {
        r.r_mean_dba = pearson(power.values_dba, mean_gain);
    } catch (const UndefinedCorrelationError&) {
    }
    return r;
}

std::string correlation_json(const audio::PowerSeries& power, std::span<const telemetry::TelemetryRecord> records,
                             const CorrelationResult& result) {
    nlohmann::ordered_json j;
    j["points"] = result.points;
    j["r_mean"] = result.r_mean;
    j["r_min"] = result.r_min;
    j["r_mean_dba"] = result.r_mean_dba ? nlohmann::ordered_json(*result.r_mean_dba) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < records.size() && i < power.size(); ++i) {
        pairs.push_back({{"minute", records[i].minute_index},
                         {"window_dbfs", power.values_dbfs[i]},
                         {"window_dba", power.values_dba[i]},
                         {"mean_frame_dbfs", power.mean_frame_dbfs[i]},
                         {"max_frame_dbfs", power.max_frame_dbfs[i]},
                         {"min_gain", records[i].min_gain},
                         {"mean_gain", records[i].mean_gain},
                         {"max_gain", records[i].max_gain}});
    }
    j["minutes"] = pairs;
    return j.dump(2) + "\n";
}

}  // namespace gainprint::analysis
