#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "gainprint/model.hpp"

namespace gainprint::model {

namespace {

constexpr char kMagic[4] = {'G', 'P', 'R', 'T'};
// Refuse absurd parameter counts before allocating.
constexpr std::uint32_t kMaxParams = 1u << 28;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
    return static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

class Cursor {
public:
    explicit Cursor(std::span<const std::uint8_t> b) : bytes_(b) {}
    std::uint32_t u32(const char* what) {
        if (bytes_.size() - pos_ < 4) throw CheckpointError(std::string("checkpoint: truncated at ") + what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    double f32(const char* what) {
        const float f = std::bit_cast<float>(u32(what));
        if (!std::isfinite(f)) throw CheckpointError(std::string("checkpoint: non-finite value in ") + what);
        return static_cast<double>(f);
    }
    std::size_t pos() const noexcept { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> checkpoint_bytes(const Model& model) {
    const auto& s = model.spec;
    std::vector<std::uint8_t> out;
    out.reserve(64 + 4 * model.params.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kCheckpointVersion);
    for (std::size_t v : {s.n, s.c1, s.k1, s.c2, s.k2, s.d1, s.d2, s.classes}) put_u32(out, static_cast<std::uint32_t>(v));
    for (double v : model.norm.mean) put_f32(out, v);
    for (double v : model.norm.stddev) put_f32(out, v);
    put_u32(out, static_cast<std::uint32_t>(model.params.size()));
    for (double v : model.params) put_f32(out, v);
    put_u32(out, crc_of(out));
    return out;
}

Model checkpoint_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw CheckpointError("checkpoint: missing GPRT magic");
    Cursor c(bytes.subspan(4));
    const std::uint32_t version = c.u32("version");
    if (version != kCheckpointVersion)
        throw CheckpointError("checkpoint: unsupported format version " + std::to_string(version));
    if (bytes.size() < 8 + 4) throw CheckpointError("checkpoint: truncated");
    const std::uint32_t stored_crc = [&] {
        const auto* p = bytes.data() + bytes.size() - 4;
        return static_cast<std::uint32_t>(p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24));
    }();

    NetworkSpec spec;
    spec.n = c.u32("n");
    spec.c1 = c.u32("c1");
    spec.k1 = c.u32("k1");
    spec.c2 = c.u32("c2");
    spec.k2 = c.u32("k2");
    spec.d1 = c.u32("d1");
    spec.d2 = c.u32("d2");
    spec.classes = c.u32("classes");
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint: invalid network dimensions: ") + e.what());
    }

    Model model(spec);
    for (auto& v : model.norm.mean) v = c.f32("normalization mean");
    for (auto& v : model.norm.stddev) {
        v = c.f32("normalization stddev");
        if (!(v > 0.0)) throw CheckpointError("checkpoint: non-positive normalization stddev");
    }
    const std::uint32_t count = c.u32("parameter count");
    if (count > kMaxParams || count != model.params.size())
        throw CheckpointError("checkpoint: parameter count " + std::to_string(count) + " does not match dimensions (" +
                              std::to_string(model.params.size()) + ")");
    const std::size_t expected_size = 4 + c.pos() + 4 * static_cast<std::size_t>(count) + 4;
    if (bytes.size() != expected_size)
        throw CheckpointError("checkpoint: size " + std::to_string(bytes.size()) + " bytes, expected " +
                              std::to_string(expected_size));
    if (crc_of(bytes.first(bytes.size() - 4)) != stored_crc) throw CheckpointError("checkpoint: CRC mismatch");
    for (auto& p : model.params) p = c.f32("parameters");
    return model;
}

void checkpoint_save(const Model& model, const std::string& path) {
    const auto bytes = checkpoint_bytes(model);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Model checkpoint_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return checkpoint_from_bytes(bytes);
}

}  // namespace gainprint::model
