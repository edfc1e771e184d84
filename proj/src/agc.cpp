#include <algorithm>
#include <cmath>

#include "gainprint/telemetry.hpp"

namespace gainprint::telemetry {

std::string_view to_string(MutePolicy p) noexcept {
    switch (p) {
        case MutePolicy::ContinuousSampling: return "continuous";
        case MutePolicy::StatusFlagsOnly: return "status-flags";
        case MutePolicy::SoftwareMute: return "software-mute";
    }
    return "continuous";
}

std::optional<MutePolicy> parse_mute_policy(std::string_view text) {
    if (text == "continuous" || text == "ContinuousSampling") return MutePolicy::ContinuousSampling;
    if (text == "status-flags" || text == "StatusFlagsOnly") return MutePolicy::StatusFlagsOnly;
    if (text == "software-mute" || text == "SoftwareMute") return MutePolicy::SoftwareMute;
    return std::nullopt;
}

void AgcConfig::validate() const {
    if (!(target_level_dbfs < 0.0) || !std::isfinite(target_level_dbfs))
        throw ConfigError("agc: target_level_dbfs must be negative and finite");
    if (!(g_max_db > 0.0) || !std::isfinite(g_max_db)) throw ConfigError("agc: g_max_db must be positive");
    if (frame_seconds <= 0 || 60 % frame_seconds != 0)
        throw ConfigError("agc: frame_seconds must divide 60, got " + std::to_string(frame_seconds));
}

void check_record(const TelemetryRecord& rec, double g_max) {
    for (double g : {rec.min_gain, rec.mean_gain, rec.max_gain}) {
        if (!std::isfinite(g) || g < 0.0 || g > g_max)
            throw DomainError("telemetry: gain " + std::to_string(g) + " outside [0, " + std::to_string(g_max) + "]");
    }
    if (!(rec.min_gain <= rec.mean_gain && rec.mean_gain <= rec.max_gain))
        throw DomainError("telemetry: gains violate min <= mean <= max");
}

double frame_gain(double level_dbfs, const AgcConfig& cfg) noexcept {
    return std::clamp(cfg.target_level_dbfs - level_dbfs, 0.0, cfg.g_max_db);
}

TelemetryRecord minute_record(std::span<const double> levels, std::uint64_t minute_index, std::string session_id,
                              std::optional<ActivityLabel> label, const AgcConfig& cfg) {
    const auto expected = static_cast<std::size_t>(cfg.frames_per_minute());
    if (levels.size() != expected)
        throw DomainError("minute_record: expected " + std::to_string(expected) + " frame levels, got " +
                          std::to_string(levels.size()));
    double lo = cfg.g_max_db;
    double hi = 0.0;
    double sum = 0.0;
    for (double level : levels) {
        const double g = frame_gain(level, cfg);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
        sum += g;
    }
    TelemetryRecord rec;
    rec.minute_index = minute_index;
    rec.min_gain = lo;
    rec.max_gain = hi;
    // Rounding in the sum can push the mean one ulp past an extreme.
    rec.mean_gain = std::clamp(sum / static_cast<double>(levels.size()), lo, hi);
    rec.session_id = std::move(session_id);
    rec.label = label;
    return rec;
}

std::vector<TelemetryRecord> emulate_stream(const audio::AudioClipSource& src, MutePolicy policy,
                                            const AgcConfig& cfg) {
    cfg.validate();
    const std::size_t minutes = src.whole_minutes();
    if (minutes == 0) throw DomainError("emulate_stream: source '" + src.source_id + "' is shorter than one minute");
    if (!audio::is_supported_rate(src.sample_rate))
        throw UnsupportedFormatError("sample_rate", "emulate_stream: unsupported sample rate");
    if (policy == MutePolicy::SoftwareMute) return {};

    const std::size_t minute_samples = static_cast<std::size_t>(src.sample_rate) * 60;
    const std::span<const float> all(src.samples);
    std::vector<TelemetryRecord> out(minutes);
#pragma omp parallel for schedule(static)
    for (std::size_t m = 0; m < minutes; ++m) {
        const auto levels = audio::frame_levels(all.subspan(m * minute_samples, minute_samples), src.sample_rate,
                                                cfg.frame_seconds);
        if (policy == MutePolicy::ContinuousSampling) {
            out[m] = minute_record(levels, m, src.source_id, src.label, cfg);
        } else {
            TelemetryRecord rec;
            rec.minute_index = m;
            rec.session_id = src.source_id;
            rec.label = src.label;
            rec.status_only = true;
            rec.silent = *std::max_element(levels.begin(), levels.end()) < kSilentThresholdDbfs;
            out[m] = std::move(rec);
        }
    }
    return out;
}

}  // namespace gainprint::telemetry
