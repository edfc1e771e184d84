#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gainprint/audio.hpp"
#include "gainprint/labels.hpp"

// Desk-scale stand-ins for recorded background activities. Each class is
// band-limited noise whose per-second level follows a class-specific pattern;
// a per-source offset models speaker distance.
namespace gainprint::synth {

/// Intended per-second levels (dBFS) for `minutes` minutes of `label`.
std::vector<double> activity_levels(ActivityLabel label, std::size_t minutes, std::uint64_t seed,
                                    double offset_db = 0.0);

/// Renders per-second target levels as band-limited noise. Crossfades of
/// 20 ms smooth the steps between seconds.
std::vector<float> render_levels(const std::vector<double>& levels_dbfs, int sample_rate, double center_hz,
                                 double q, std::uint64_t seed);

audio::AudioClipSource synthesize_activity(ActivityLabel label, std::size_t minutes, int sample_rate,
                                           std::uint64_t seed, double offset_db = 0.0);

/// White-ish noise whose level drifts from minute to minute with a slower
/// within-minute wobble. Used for the level/gain correlation study.
audio::AudioClipSource amplitude_modulated_noise(std::size_t minutes, int sample_rate, std::uint64_t seed);

}  // namespace gainprint::synth
