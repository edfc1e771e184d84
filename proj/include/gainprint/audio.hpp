#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gainprint/labels.hpp"

namespace gainprint::audio {

inline constexpr double kFloorDb = -120.0;
inline constexpr double kFloorRms = 1e-6;

/// Sample rates accepted anywhere in the pipeline.
bool is_supported_rate(int sample_rate) noexcept;

/// Decoded mono audio. Samples are normalized to [-1, 1].
struct AudioClipSource {
    std::vector<float> samples;
    int sample_rate = 16000;
    std::optional<ActivityLabel> label;
    std::string source_id;
    std::optional<int> distance_cm;

    std::size_t whole_minutes() const noexcept;
    std::size_t whole_seconds() const noexcept;
};

enum class SampleFormat { Pcm16, Float32 };

/// Parses a RIFF/WAVE container holding 16-bit PCM or 32-bit float, mono or
/// stereo. Stereo is downmixed by channel mean.
AudioClipSource decode_wav(std::span<const std::uint8_t> bytes);
AudioClipSource read_wav_file(const std::string& path);

/// Mono writer. 16-bit output quantizes with round-to-nearest of x*32768,
/// saturating at the int16 limits, so decode(encode(x)) is sample-exact for
/// inputs that are already multiples of 1/32768.
std::vector<std::uint8_t> encode_wav(std::span<const float> samples, int sample_rate,
                                     SampleFormat format = SampleFormat::Pcm16);
void write_wav_file(const std::string& path, std::span<const float> samples, int sample_rate,
                    SampleFormat format = SampleFormat::Pcm16);

/// 20*log10(rms), clamped to kFloorDb when rms < 1e-6. Throws DomainError
/// on empty input.
double rms_dbfs(std::span<const float> samples);

/// Level function used by the AGC emulator. Kept as a single seam so a
/// peak-based estimator can replace it.
inline double frame_level_dbfs(std::span<const float> samples) { return rms_dbfs(samples); }

/// IEC 61672 A-weighting as a cascade of bilinear-transformed first-order
/// sections (the four analog corner frequencies, poles doubled at 20.6 Hz and
/// 12194 Hz), normalized to 0 dB at 1 kHz.
class AWeightingFilter {
public:
    explicit AWeightingFilter(int sample_rate);

    void reset() noexcept;
    double process(double x) noexcept;
    /// Magnitude response of the digital filter in dB.
    double response_db(double freq_hz) const;
    int sample_rate() const noexcept { return sample_rate_; }

private:
    struct Section {
        double b0, b1, a1;  // a0 normalized to 1
        double x1 = 0.0, y1 = 0.0;
    };
    int sample_rate_;
    double gain_ = 1.0;
    std::vector<Section> sections_;
};

/// A-weighted RMS level in dB with the same floor as rms_dbfs.
double a_weighted_power(std::span<const float> samples, int sample_rate);

/// Per-window levels over non-overlapping windows; a trailing partial window
/// is dropped. Besides the whole-window RMS, each window also carries the mean
/// and max of its per-frame RMS levels, which are what the AGC sees.
struct PowerSeries {
    int window_seconds = 60;
    int frame_seconds = 1;
    std::vector<double> values_dbfs;
    std::vector<double> values_dba;
    std::vector<double> mean_frame_dbfs;
    std::vector<double> max_frame_dbfs;

    std::size_t size() const noexcept { return values_dbfs.size(); }
};

PowerSeries power_series(const AudioClipSource& src, int window_seconds, int frame_seconds = 1);

/// Per-frame levels for consecutive non-overlapping frames.
std::vector<double> frame_levels(std::span<const float> samples, int sample_rate, int frame_seconds);

}  // namespace gainprint::audio
