#include "gainprint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gainprint/rng.hpp"

namespace gainprint::synth {

namespace {

struct Band {
    double center_hz;
    double q;
};

Band band_of(ActivityLabel label) {
    switch (label) {
        case ActivityLabel::ClassicalMusic: return {440.0, 1.0};
        case ActivityLabel::CookingEating: return {2000.0, 0.7};
        case ActivityLabel::CrowdTalking: return {500.0, 0.8};
        case ActivityLabel::DogBarking: return {800.0, 2.0};
        case ActivityLabel::Keyboard: return {3000.0, 1.5};
        case ActivityLabel::VacuumCleaning: return {150.0, 0.5};
    }
    return {1000.0, 1.0};
}

// RBJ constant-peak band-pass biquad.
struct Biquad {
    double b0, b1, b2, a1, a2;
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;

    Biquad(double center_hz, double q, int sample_rate) {
        const double w0 = 2.0 * std::numbers::pi * center_hz / sample_rate;
        const double alpha = std::sin(w0) / (2.0 * q);
        const double a0 = 1.0 + alpha;
        b0 = alpha / a0;
        b1 = 0.0;
        b2 = -alpha / a0;
        a1 = -2.0 * std::cos(w0) / a0;
        a2 = (1.0 - alpha) / a0;
    }

    double step(double x) {
        const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = x;
        y2 = y1;
        y1 = y;
        return y;
    }
};

}  // namespace

std::vector<double> activity_levels(ActivityLabel label, std::size_t minutes, std::uint64_t seed, double offset_db) {
    Rng rng(seed ^ 0x9E3779B97F4A7C15ull);
    std::vector<double> out;
    out.reserve(minutes * 60);
    const double period = rng.uniform(90.0, 150.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t m = 0; m < minutes; ++m) {
        switch (label) {
            case ActivityLabel::ClassicalMusic: {
                const double drift = rng.normal(0.0, 2.0);
                for (int s = 0; s < 60; ++s) {
                    const double t = static_cast<double>(m * 60 + static_cast<std::size_t>(s));
                    out.push_back(-32.0 + 8.0 * std::sin(2.0 * std::numbers::pi * t / period + phase) + drift +
                                  rng.normal(0.0, 0.7));
                }
                break;
            }
            case ActivityLabel::CookingEating: {
                const double base = -42.0 + rng.normal(0.0, 1.0);
                for (int s = 0; s < 60; ++s)
                    out.push_back(rng.uniform01() < 0.25 ? rng.normal(-30.0, 4.0) : base + rng.normal(0.0, 2.0));
                break;
            }
            case ActivityLabel::CrowdTalking: {
                const double drift = rng.normal(0.0, 1.5);
                for (int s = 0; s < 60; ++s) out.push_back(-28.0 + drift + rng.normal(0.0, 1.5));
                break;
            }
            case ActivityLabel::DogBarking: {
                const bool barking = rng.uniform01() < 0.5;
                const int start = static_cast<int>(rng.below(50));
                const int length = 3 + static_cast<int>(rng.below(8));
                for (int s = 0; s < 60; ++s) {
                    const bool bark = barking && s >= start && s < start + length;
                    out.push_back(bark ? rng.uniform(-24.0, -18.0) : -46.0 + rng.normal(0.0, 2.0));
                }
                break;
            }
            case ActivityLabel::Keyboard: {
                for (int s = 0; s < 60; ++s)
                    out.push_back(rng.uniform01() < 0.15 ? -46.0 + rng.normal(0.0, 1.0) : -36.0 + rng.normal(0.0, 3.0));
                break;
            }
            case ActivityLabel::VacuumCleaning: {
                const bool off = rng.uniform01() < 0.15;
                const int cut = off ? static_cast<int>(rng.below(60)) : 60;
                for (int s = 0; s < 60; ++s)
                    out.push_back(s < cut ? -22.0 + rng.normal(0.0, 0.5) : -45.0 + rng.normal(0.0, 1.0));
                break;
            }
        }
    }
    for (double& v : out) v = std::min(v + offset_db, -3.0);
    return out;
}

std::vector<float> render_levels(const std::vector<double>& levels_dbfs, int sample_rate, double center_hz, double q,
                                 std::uint64_t seed) {
    Rng rng(seed);
    Biquad filter(center_hz, q, sample_rate);
    const std::size_t per_second = static_cast<std::size_t>(sample_rate);
    const std::size_t fade = per_second / 50;  // 20 ms
    const double unit = std::sqrt(3.0);         // uniform on [-sqrt3, sqrt3] has unit variance

    // Settle the filter, then measure its output RMS for unit-variance input.
    double acc = 0.0;
    for (std::size_t i = 0; i < per_second; ++i) filter.step(rng.uniform(-unit, unit));
    for (std::size_t i = 0; i < 4 * per_second; ++i) {
        const double y = filter.step(rng.uniform(-unit, unit));
        acc += y * y;
    }
    const double norm = 1.0 / std::sqrt(acc / static_cast<double>(4 * per_second));

    std::vector<float> out(levels_dbfs.size() * per_second);
    double previous = levels_dbfs.empty() ? 0.0 : std::pow(10.0, levels_dbfs.front() / 20.0);
    for (std::size_t s = 0; s < levels_dbfs.size(); ++s) {
        const double target = std::pow(10.0, levels_dbfs[s] / 20.0);
        for (std::size_t i = 0; i < per_second; ++i) {
            const double ramp = i < fade ? static_cast<double>(i) / static_cast<double>(fade) : 1.0;
            const double amp = previous + (target - previous) * ramp;
            const double y = filter.step(rng.uniform(-unit, unit)) * norm * amp;
            out[s * per_second + i] = static_cast<float>(std::clamp(y, -1.0, 1.0));
        }
        previous = target;
    }
    return out;
}

audio::AudioClipSource synthesize_activity(ActivityLabel label, std::size_t minutes, int sample_rate,
                                           std::uint64_t seed, double offset_db) {
    const auto levels = activity_levels(label, minutes, seed, offset_db);
    const Band band = band_of(label);
    audio::AudioClipSource src;
    src.sample_rate = sample_rate;
    src.samples = render_levels(levels, sample_rate, band.center_hz, band.q, seed + 1);
    src.label = label;
    return src;
}

audio::AudioClipSource amplitude_modulated_noise(std::size_t minutes, int sample_rate, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> levels;
    levels.reserve(minutes * 60);
    for (std::size_t m = 0; m < minutes; ++m) {
        const double minute_level =
            -35.0 + 8.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(m) / 7.0) + rng.normal(0.0, 2.0);
        for (int s = 0; s < 60; ++s)
            levels.push_back(minute_level + 3.0 * std::sin(2.0 * std::numbers::pi * s / 10.0));
    }
    audio::AudioClipSource src;
    src.sample_rate = sample_rate;
    src.samples = render_levels(levels, sample_rate, 1000.0, 0.3, seed + 1);
    return src;
}

}  // namespace gainprint::synth
