#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gainprint/audio.hpp"
#include "gainprint/error.hpp"
#include "gainprint/labels.hpp"

namespace gainprint::telemetry {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kDefaultGMax = 30.0;
/// Frames quieter than this everywhere in a minute raise the silent flag.
inline constexpr double kSilentThresholdDbfs = -60.0;

/// One minute of muted-client telemetry: min/mean/max of the AGC frame gains.
struct TelemetryRecord {
    std::uint64_t minute_index = 0;
    double min_gain = 0.0;
    double mean_gain = 0.0;
    double max_gain = 0.0;
    std::string session_id;
    std::optional<ActivityLabel> label;
    /// Set for records emitted under the status-flags-only policy; the gains
    /// are then the (0, 0, 0) sentinel and only `silent` carries information.
    bool status_only = false;
    bool silent = false;

    bool operator==(const TelemetryRecord&) const = default;
};

/// Throws DomainError when the gain ordering or [0, g_max] range is violated.
void check_record(const TelemetryRecord& rec, double g_max = kDefaultGMax);

enum class MutePolicy { ContinuousSampling, StatusFlagsOnly, SoftwareMute };

std::string_view to_string(MutePolicy p) noexcept;
/// Accepts "continuous", "status-flags", "software-mute" and the enum names.
std::optional<MutePolicy> parse_mute_policy(std::string_view text);

/// Target-level AGC: gain = clamp(target - level, 0, g_max) per frame.
struct AgcConfig {
    double target_level_dbfs = -20.0;
    double g_max_db = kDefaultGMax;
    int frame_seconds = 1;

    /// Throws ConfigError.
    void validate() const;
    int frames_per_minute() const noexcept { return 60 / frame_seconds; }
};

double frame_gain(double level_dbfs, const AgcConfig& cfg) noexcept;

TelemetryRecord minute_record(std::span<const double> levels, std::uint64_t minute_index,
                              std::string session_id, std::optional<ActivityLabel> label,
                              const AgcConfig& cfg);

/// Runs the muted-client emulation over every whole minute of `src`.
std::vector<TelemetryRecord> emulate_stream(const audio::AudioClipSource& src, MutePolicy policy,
                                            const AgcConfig& cfg);

struct TelemetryPacket {
    int schema_version = kSchemaVersion;
    std::uint64_t timestamp_ms = 0;
    std::string session_id;
    /// Ground-truth label stamped at collection time; absent on unlabeled captures.
    std::optional<ActivityLabel> label;
    /// Present only for status-flags-only records.
    std::optional<bool> silent;
    std::string payload_b64;

    bool operator==(const TelemetryPacket&) const = default;
};

TelemetryPacket encode_packet(const TelemetryRecord& rec, std::uint64_t timestamp_ms);

/// One line of UTF-8 JSON terminated by '\n'. Key order is fixed so equal
/// packets serialize to equal bytes.
std::string serialize(const TelemetryPacket& packet);

enum class PacketErrorKind {
    InvalidJson,
    InvalidEnvelope,
    InvalidBase64,
    InvalidPayload,
    MissingKey,
    UnexpectedKey,
    BadValue,
    GainOrder,
    GainRange,
};

std::string_view to_string(PacketErrorKind k) noexcept;

class PacketError : public Error {
public:
    PacketError(PacketErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
    PacketErrorKind kind() const noexcept { return kind_; }

private:
    PacketErrorKind kind_;
};

/// Parses the envelope only; the payload is left encoded.
TelemetryPacket parse_packet(std::string_view line);

/// Full inverse of serialize(encode_packet(rec, ts)). Throws PacketError.
TelemetryRecord decode_packet(std::string_view line, double g_max = kDefaultGMax);

/// Writes one packet per record; timestamp = start_ms + minute_index * 60000.
void write_stream(std::ostream& out, std::span<const TelemetryRecord> records, std::uint64_t start_ms = 0);

struct LineError {
    std::size_t line = 0;  // 1-based
    PacketErrorKind kind;
    std::string message;
};

struct StreamReadResult {
    std::vector<TelemetryRecord> records;
    std::vector<LineError> errors;
};

/// Decodes every non-empty line, collecting failures instead of stopping.
StreamReadResult read_stream(std::istream& in, double g_max = kDefaultGMax);

}  // namespace gainprint::telemetry
