#include <algorithm>
#include <cmath>
#include <numeric>

#include "gainprint/audio.hpp"
#include "gainprint/error.hpp"

namespace gainprint::audio {

bool is_supported_rate(int sample_rate) noexcept {
    return sample_rate == 16000 || sample_rate == 44100 || sample_rate == 48000;
}

std::size_t AudioClipSource::whole_seconds() const noexcept {
    if (sample_rate <= 0) return 0;
    return samples.size() / static_cast<std::size_t>(sample_rate);
}

std::size_t AudioClipSource::whole_minutes() const noexcept { return whole_seconds() / 60; }

double rms_dbfs(std::span<const float> samples) {
    if (samples.empty()) throw DomainError("rms_dbfs: empty sample sequence");
    double acc = 0.0;
    for (float s : samples) acc += static_cast<double>(s) * static_cast<double>(s);
    const double rms = std::sqrt(acc / static_cast<double>(samples.size()));
    if (rms < kFloorRms) return kFloorDb;
    return 20.0 * std::log10(rms);
}

std::vector<double> frame_levels(std::span<const float> samples, int sample_rate, int frame_seconds) {
    if (frame_seconds <= 0) throw DomainError("frame_levels: frame_seconds must be positive");
    const std::size_t frame = static_cast<std::size_t>(sample_rate) * static_cast<std::size_t>(frame_seconds);
    const std::size_t count = samples.size() / frame;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = frame_level_dbfs(samples.subspan(i * frame, frame));
    return out;
}

PowerSeries power_series(const AudioClipSource& src, int window_seconds, int frame_seconds) {
    if (window_seconds <= 0) throw DomainError("power_series: window_seconds must be positive");
    if (frame_seconds <= 0 || window_seconds % frame_seconds != 0)
        throw DomainError("power_series: frame_seconds must divide window_seconds");
    if (!is_supported_rate(src.sample_rate))
        throw UnsupportedFormatError("sample_rate", "power_series: unsupported sample rate " +
                                                        std::to_string(src.sample_rate));
    const std::size_t window =
        static_cast<std::size_t>(src.sample_rate) * static_cast<std::size_t>(window_seconds);
    const std::size_t count = src.samples.size() / window;
    if (count == 0)
        throw DomainError("power_series: input shorter than one " + std::to_string(window_seconds) +
                          " s window");

    PowerSeries out;
    out.window_seconds = window_seconds;
    out.frame_seconds = frame_seconds;
    out.values_dbfs.resize(count);
    out.values_dba.resize(count);
    out.mean_frame_dbfs.resize(count);
    out.max_frame_dbfs.resize(count);

    const std::span<const float> all(src.samples);
#pragma omp parallel for schedule(static)
    for (std::size_t w = 0; w < count; ++w) {
        const auto chunk = all.subspan(w * window, window);
        out.values_dbfs[w] = rms_dbfs(chunk);
        out.values_dba[w] = a_weighted_power(chunk, src.sample_rate);
        const auto frames = frame_levels(chunk, src.sample_rate, frame_seconds);
        out.mean_frame_dbfs[w] =
            std::accumulate(frames.begin(), frames.end(), 0.0) / static_cast<double>(frames.size());
        out.max_frame_dbfs[w] = *std::max_element(frames.begin(), frames.end());
    }
    return out;
}

}  // namespace gainprint::audio
