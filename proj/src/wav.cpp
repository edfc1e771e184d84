#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gainprint/audio.hpp"
#include "gainprint/error.hpp"

namespace gainprint::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    std::size_t pos() const noexcept { return pos_; }

    std::uint16_t u16(const char* what) {
        need(2, what);
        const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    std::string tag(const char* what) {
        need(4, what);
        std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
        pos_ += 4;
        return t;
    }
    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    void skip(std::size_t n, const char* what) { take(n, what); }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) throw FormatError(std::string("wav: truncated while reading ") + what);
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t block_align = 0;
    std::uint16_t bits = 0;
};

FmtChunk parse_fmt(std::span<const std::uint8_t> body) {
    if (body.size() < 16) throw FormatError("wav: fmt chunk shorter than 16 bytes");
    Reader r(body);
    FmtChunk f;
    f.format = r.u16("audio format");
    f.channels = r.u16("channel count");
    f.sample_rate = r.u32("sample rate");
    r.u32("byte rate");
    f.block_align = r.u16("block align");
    f.bits = r.u16("bits per sample");
    if (f.format == kFormatExtensible) {
        if (body.size() < 40) throw FormatError("wav: extensible fmt chunk shorter than 40 bytes");
        r.u16("extension size");
        r.u16("valid bits");
        r.u32("channel mask");
        f.format = r.u16("sub-format");
    }
    return f;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

AudioClipSource decode_wav(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (r.tag("RIFF tag") != "RIFF") throw FormatError("wav: missing RIFF tag");
    r.u32("RIFF size");
    if (r.tag("WAVE tag") != "WAVE") throw FormatError("wav: missing WAVE tag");

    std::optional<FmtChunk> fmt;
    std::optional<std::span<const std::uint8_t>> data;
    while (r.remaining() >= 8 && !(fmt && data)) {
        const std::string id = r.tag("chunk id");
        const std::uint32_t size = r.u32("chunk size");
        if (id == "data") {
            // Some writers leave the data size unset or oversized; clamp to what is present.
            const std::size_t n = std::min<std::size_t>(size, r.remaining());
            data = r.take(n, "data chunk");
        } else {
            auto body = r.take(size, "chunk body");
            if (id == "fmt ") fmt = parse_fmt(body);
        }
        if ((size & 1u) != 0 && r.remaining() > 0) r.skip(1, "chunk padding");
    }
    if (!fmt) throw FormatError("wav: no fmt chunk");
    if (!data) throw FormatError("wav: no data chunk");

    if (fmt->channels != 1 && fmt->channels != 2)
        throw UnsupportedFormatError("channels",
                                     "wav: unsupported channel count " + std::to_string(fmt->channels));
    if (!is_supported_rate(static_cast<int>(fmt->sample_rate)))
        throw UnsupportedFormatError("sample_rate",
                                     "wav: unsupported sample rate " + std::to_string(fmt->sample_rate));
    const bool pcm16 = fmt->format == kFormatPcm && fmt->bits == 16;
    const bool f32 = fmt->format == kFormatFloat && fmt->bits == 32;
    if (!pcm16 && !f32) {
        if (fmt->format == kFormatPcm || fmt->format == kFormatFloat)
            throw UnsupportedFormatError("bits_per_sample", "wav: unsupported bits per sample " +
                                                                std::to_string(fmt->bits));
        throw UnsupportedFormatError("audio_format",
                                     "wav: unsupported audio format " + std::to_string(fmt->format));
    }
    const std::size_t bytes_per_sample = fmt->bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
    if (fmt->block_align != frame_bytes)
        throw FormatError("wav: block align " + std::to_string(fmt->block_align) + " does not match " +
                          std::to_string(frame_bytes));

    const auto payload = *data;
    const std::size_t frames = payload.size() / frame_bytes;
    AudioClipSource out;
    out.sample_rate = static_cast<int>(fmt->sample_rate);
    out.samples.resize(frames);

    const auto read_sample = [&](std::size_t offset) -> double {
        const std::uint8_t* p = payload.data() + offset;
        if (pcm16) {
            const auto raw = static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0] | (p[1] << 8)));
            return static_cast<double>(raw) / 32768.0;
        }
        std::uint32_t bits = 0;
        for (int i = 3; i >= 0; --i) bits = (bits << 8) | p[i];
        const float v = std::bit_cast<float>(bits);
        if (!std::isfinite(v)) throw FormatError("wav: non-finite float sample");
        return std::clamp(static_cast<double>(v), -1.0, 1.0);
    };

    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < fmt->channels; ++c) acc += read_sample(i * frame_bytes + c * bytes_per_sample);
        out.samples[i] = static_cast<float>(acc / fmt->channels);
    }
    return out;
}

AudioClipSource read_wav_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(std::span<const float> samples, int sample_rate, SampleFormat format) {
    if (!is_supported_rate(sample_rate))
        throw UnsupportedFormatError("sample_rate", "wav: unsupported sample rate " + std::to_string(sample_rate));
    const std::uint16_t bits = format == SampleFormat::Pcm16 ? 16 : 32;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * (bits / 8));

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, format == SampleFormat::Pcm16 ? kFormatPcm : kFormatFloat);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate) * (bits / 8));
    put_u16(out, static_cast<std::uint16_t>(bits / 8));
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (float s : samples) {
        if (format == SampleFormat::Pcm16) {
            const double q = std::nearbyint(static_cast<double>(s) * 32768.0);
            const auto v = static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0));
            put_u16(out, static_cast<std::uint16_t>(v));
        } else {
            put_u32(out, std::bit_cast<std::uint32_t>(s));
        }
    }
    return out;
}

void write_wav_file(const std::string& path, std::span<const float> samples, int sample_rate,
                    SampleFormat format) {
    const auto bytes = encode_wav(samples, sample_rate, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + path);
}

}  // namespace gainprint::audio
