#include <cmath>
#include <complex>
#include <numbers>

#include "gainprint/audio.hpp"
#include "gainprint/error.hpp"

namespace gainprint::audio {

namespace {

// Analog corner frequencies of the IEC 61672 A-weighting curve.
constexpr double kF1 = 20.598997;
constexpr double kF2 = 107.65265;
constexpr double kF3 = 737.86223;
constexpr double kF4 = 12194.217;

}  // namespace

// H(s) = s^4 / ((s+w1)^2 (s+w2) (s+w3) (s+w4)^2), split into four s/(s+w)
// high-pass sections and two 1/(s+w) low-pass sections. Each is mapped with
// s = 2 fs (1 - z^-1) / (1 + z^-1).
AWeightingFilter::AWeightingFilter(int sample_rate) : sample_rate_(sample_rate) {
    if (!is_supported_rate(sample_rate))
        throw UnsupportedFormatError("sample_rate",
                                     "A-weighting: unsupported sample rate " + std::to_string(sample_rate));
    const double k = 2.0 * static_cast<double>(sample_rate);
    const auto w = [](double f) { return 2.0 * std::numbers::pi * f; };

    const auto high_pass = [&](double wc) {
        const double a0 = k + wc;
        return Section{k / a0, -k / a0, (wc - k) / a0};
    };
    const auto low_pass = [&](double wc) {
        const double a0 = k + wc;
        return Section{1.0 / a0, 1.0 / a0, (wc - k) / a0};
    };
    sections_ = {high_pass(w(kF1)), high_pass(w(kF1)), high_pass(w(kF2)),
                 high_pass(w(kF3)), low_pass(w(kF4)),  low_pass(w(kF4))};
    gain_ = 1.0;
    gain_ = std::pow(10.0, -response_db(1000.0) / 20.0);
}

void AWeightingFilter::reset() noexcept {
    for (auto& s : sections_) s.x1 = s.y1 = 0.0;
}

double AWeightingFilter::process(double x) noexcept {
    double v = x * gain_;
    for (auto& s : sections_) {
        const double y = s.b0 * v + s.b1 * s.x1 - s.a1 * s.y1;
        s.x1 = v;
        s.y1 = y;
        v = y;
    }
    return v;
}

double AWeightingFilter::response_db(double freq_hz) const {
    const double omega = 2.0 * std::numbers::pi * freq_hz / static_cast<double>(sample_rate_);
    const std::complex<double> zinv = std::polar(1.0, -omega);
    std::complex<double> h(gain_, 0.0);
    for (const auto& s : sections_) h *= (s.b0 + s.b1 * zinv) / (1.0 + s.a1 * zinv);
    return 20.0 * std::log10(std::abs(h));
}

double a_weighted_power(std::span<const float> samples, int sample_rate) {
    AWeightingFilter filter(sample_rate);
    if (samples.empty()) throw DomainError("a_weighted_power: empty sample sequence");
    double acc = 0.0;
    for (float s : samples) {
        const double y = filter.process(static_cast<double>(s));
        acc += y * y;
    }
    const double rms = std::sqrt(acc / static_cast<double>(samples.size()));
    if (rms < kFloorRms) return kFloorDb;
    return 20.0 * std::log10(rms);
}

}  // namespace gainprint::audio
