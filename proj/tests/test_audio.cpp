#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gainprint/audio.hpp"
#include "gainprint/base64.hpp"
#include "gainprint/error.hpp"
#include "gainprint/rng.hpp"
#include "test_util.hpp"

using namespace gainprint;
using namespace gainprint::audio;

namespace {

// Analog A-weighting magnitude in dB, normalized so that 1 kHz reads 0 dB.
double analog_a_weight_db(double f) {
    auto ra = [](double f) {
        const double f2 = f * f;
        const double c1 = 20.598997 * 20.598997, c2 = 107.65265 * 107.65265;
        const double c3 = 737.86223 * 737.86223, c4 = 12194.217 * 12194.217;
        return c4 * f2 * f2 / ((f2 + c1) * std::sqrt((f2 + c2) * (f2 + c3)) * (f2 + c4));
    };
    return 20.0 * std::log10(ra(f) / ra(1000.0));
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(v & 0xff);
    b.push_back(v >> 8);
}
void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}
void put_tag(std::vector<std::uint8_t>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

std::vector<std::uint8_t> pcm16_wav(int channels, std::uint32_t rate, const std::vector<std::int16_t>& data,
                                    std::uint16_t bits = 16, std::uint16_t format = 1) {
    std::vector<std::uint8_t> b;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(data.size() * 2);
    put_tag(b, "RIFF");
    put_u32(b, 36 + data_bytes);
    put_tag(b, "WAVE");
    put_tag(b, "fmt ");
    put_u32(b, 16);
    put_u16(b, format);
    put_u16(b, static_cast<std::uint16_t>(channels));
    put_u32(b, rate);
    put_u32(b, rate * channels * 2);
    put_u16(b, static_cast<std::uint16_t>(channels * 2));
    put_u16(b, bits);
    put_tag(b, "data");
    put_u32(b, data_bytes);
    for (auto s : data) put_u16(b, static_cast<std::uint16_t>(s));
    return b;
}

}  // namespace

TEST_CASE("rms_dbfs of a full-scale sine is -3.01 dB") {
    const auto x = test_util::sine(1000.0, 1.0, 16000, 16000);
    CHECK(rms_dbfs(x) == doctest::Approx(-3.0103).epsilon(1e-4));
}

TEST_CASE("rms_dbfs floors silence and rejects empty input") {
    std::vector<float> zeros(100, 0.0f);
    CHECK(rms_dbfs(zeros) == kFloorDb);
    std::vector<float> tiny(100, 1e-7f);
    CHECK(rms_dbfs(tiny) == kFloorDb);
    CHECK_THROWS_AS(rms_dbfs(std::span<const float>{}), DomainError);
}

TEST_CASE("halving amplitude lowers the level by 6.02 dB") {
    const auto x = test_util::sine(440.0, 0.4, 16000, 16000);
    std::vector<float> half(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) half[i] = x[i] * 0.5f;
    CHECK(rms_dbfs(x) - rms_dbfs(half) == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-6));
}

TEST_CASE("A-weighting response follows the analog curve") {
    for (int rate : {16000, 44100, 48000}) {
        AWeightingFilter f(rate);
        CHECK(std::abs(f.response_db(1000.0)) <= 0.2);
        CHECK(f.response_db(100.0) == doctest::Approx(-19.1).epsilon(0.5 / 19.1));
        for (double hz : {31.5, 63.0, 125.0, 250.0, 500.0, 2000.0}) {
            INFO("rate " << rate << " f " << hz);
            CHECK(std::abs(f.response_db(hz) - analog_a_weight_db(hz)) < 0.5);
        }
    }
}

TEST_CASE("A-weighting filter output matches its response on a steady tone") {
    const int rate = 48000;
    for (double hz : {100.0, 1000.0}) {
        const auto x = test_util::sine(hz, 0.5, rate, rate * 2);
        std::span<const float> tail(x.data() + rate, rate);
        AWeightingFilter f(rate);
        std::vector<float> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = static_cast<float>(f.process(x[i]));
        std::span<const float> ytail(y.data() + rate, rate);
        CHECK(rms_dbfs(ytail) - rms_dbfs(tail) == doctest::Approx(f.response_db(hz)).epsilon(0.01));
    }
}

TEST_CASE("power_series drops the trailing partial window") {
    AudioClipSource src;
    src.sample_rate = 16000;
    src.samples = test_util::sine(500.0, 0.1, 16000, 16000 * 150);
    const auto ps = power_series(src, 60);
    CHECK(ps.size() == 2);
    CHECK(ps.values_dba.size() == 2);
    CHECK(ps.mean_frame_dbfs.size() == 2);
    CHECK(ps.values_dbfs[0] == doctest::Approx(20.0 * std::log10(0.1 / std::sqrt(2.0))).epsilon(1e-3));
    CHECK(src.whole_minutes() == 2);
    CHECK(src.whole_seconds() == 150);
}

TEST_CASE("power_series rejects too-short input and unsupported rates") {
    AudioClipSource src;
    src.sample_rate = 16000;
    src.samples.assign(16000 * 30, 0.1f);
    CHECK_THROWS_AS(power_series(src, 60), DomainError);
    src.sample_rate = 22050;
    src.samples.assign(22050 * 120, 0.1f);
    CHECK_THROWS_AS(power_series(src, 60), UnsupportedFormatError);
}

TEST_CASE("frame_levels returns one level per whole frame") {
    const auto x = test_util::sine(300.0, 0.25, 16000, 16000 * 5 + 100);
    const auto lv = frame_levels(x, 16000, 1);
    REQUIRE(lv.size() == 5);
    for (double v : lv) CHECK(v == doctest::Approx(20.0 * std::log10(0.25 / std::sqrt(2.0))).epsilon(1e-3));
}

TEST_CASE("WAV pcm16 round trip is sample exact for quantized input") {
    Rng rng(7);
    std::vector<float> x(4000);
    for (auto& s : x) s = static_cast<float>(static_cast<int>(rng.below(65536)) - 32768) / 32768.0f;
    const auto bytes = encode_wav(x, 16000);
    const auto back = decode_wav(bytes);
    CHECK(back.sample_rate == 16000);
    CHECK(back.samples == x);
}

TEST_CASE("WAV float32 round trip is exact") {
    const auto x = test_util::sine(123.0, 0.7, 44100, 1000);
    const auto back = decode_wav(encode_wav(x, 44100, SampleFormat::Float32));
    CHECK(back.sample_rate == 44100);
    CHECK(back.samples == x);
}

TEST_CASE("WAV encoder saturates at the int16 limits") {
    std::vector<float> x{1.5f, -1.5f, 1.0f, -1.0f};
    const auto back = decode_wav(encode_wav(x, 16000));
    CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
    CHECK(back.samples[1] == -1.0f);
    CHECK(back.samples[2] == doctest::Approx(32767.0 / 32768.0));
    CHECK(back.samples[3] == -1.0f);
}

TEST_CASE("stereo WAV is downmixed by channel mean") {
    const auto bytes = pcm16_wav(2, 16000, {16384, 0, -16384, -16384, 8192, 8192});
    const auto src = decode_wav(bytes);
    REQUIRE(src.samples.size() == 3);
    CHECK(src.samples[0] == doctest::Approx(0.25));
    CHECK(src.samples[1] == doctest::Approx(-0.5));
    CHECK(src.samples[2] == doctest::Approx(0.25));
}

TEST_CASE("WAV decoder names the unsupported field") {
    auto field_of = [](const std::vector<std::uint8_t>& b) {
        try {
            decode_wav(b);
        } catch (const UnsupportedFormatError& e) {
            return e.field();
        }
        return std::string("none");
    };
    CHECK(field_of(pcm16_wav(3, 16000, {0, 0, 0})) == "channels");
    CHECK(field_of(pcm16_wav(1, 22050, {0})) == "sample_rate");
    CHECK(field_of(pcm16_wav(1, 16000, {0}, 24)) == "bits_per_sample");
    CHECK(field_of(pcm16_wav(1, 16000, {0}, 16, 2)) == "audio_format");
}

TEST_CASE("malformed WAV containers raise FormatError") {
    auto good = pcm16_wav(1, 16000, {1, 2, 3, 4});
    CHECK_NOTHROW(decode_wav(good));
    std::vector<std::uint8_t> truncated(good.begin(), good.begin() + 20);
    CHECK_THROWS_AS(decode_wav(truncated), FormatError);
    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_wav(bad_magic), FormatError);
    auto bad_align = good;
    bad_align[32] = 4;  // block_align field
    CHECK_THROWS_AS(decode_wav(bad_align), FormatError);
}

TEST_CASE("base64 matches the RFC 4648 test vectors") {
    const std::pair<const char*, const char*> vectors[] = {
        {"", ""},           {"f", "Zg=="},         {"fo", "Zm8="},         {"foo", "Zm9v"},
        {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
    };
    for (const auto& [plain, enc] : vectors) {
        CHECK(base64::encode(std::string_view(plain)) == enc);
        const auto dec = base64::decode(enc);
        REQUIRE(dec.has_value());
        CHECK(std::string(dec->begin(), dec->end()) == plain);
    }
}

TEST_CASE("base64 decoding is strict") {
    CHECK_FALSE(base64::decode("Zm9").has_value());
    CHECK_FALSE(base64::decode("Zm9v!A==").has_value());
    CHECK_FALSE(base64::decode("Zg=a").has_value());
    CHECK_FALSE(base64::decode("Zh==").has_value());
    CHECK_FALSE(base64::decode("=Zg=").has_value());
    CHECK_FALSE(base64::decode("Zg==Zg==").has_value());
}
