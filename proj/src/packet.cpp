#include <cmath>
#include <istream>
#include <ostream>

#include "gainprint/base64.hpp"
#include "gainprint/telemetry.hpp"
#include "json.hpp"

namespace gainprint::telemetry {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr const char* kMinKey = "audioMinGain";
constexpr const char* kMeanKey = "audioMeanGain";
constexpr const char* kMaxKey = "audioMaxGain";
constexpr const char* kMinuteKey = "minuteIndex";

[[noreturn]] void fail(PacketErrorKind kind, const std::string& what) {
    throw PacketError(kind, std::string("packet: ") + std::string(to_string(kind)) + ": " + what);
}

json parse_json(std::string_view text, PacketErrorKind kind, const char* where) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        fail(kind, std::string(where) + " is not valid JSON (" + e.what() + ")");
    }
}

double gain_value(const json& payload, const char* key) {
    const auto& v = payload.at(key);
    if (!v.is_number()) fail(PacketErrorKind::BadValue, std::string(key) + " is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(PacketErrorKind::BadValue, std::string(key) + " is not finite");
    return d;
}

}  // namespace

std::string_view to_string(PacketErrorKind k) noexcept {
    switch (k) {
        case PacketErrorKind::InvalidJson: return "invalid-json";
        case PacketErrorKind::InvalidEnvelope: return "invalid-envelope";
        case PacketErrorKind::InvalidBase64: return "invalid-base64";
        case PacketErrorKind::InvalidPayload: return "invalid-payload";
        case PacketErrorKind::MissingKey: return "missing-key";
        case PacketErrorKind::UnexpectedKey: return "unexpected-key";
        case PacketErrorKind::BadValue: return "bad-value";
        case PacketErrorKind::GainOrder: return "gain-order";
        case PacketErrorKind::GainRange: return "gain-range";
    }
    return "unknown";
}

TelemetryPacket encode_packet(const TelemetryRecord& rec, std::uint64_t timestamp_ms) {
    check_record(rec, std::max(kDefaultGMax, rec.max_gain));
    ordered_json payload;
    payload[kMinKey] = rec.min_gain;
    payload[kMeanKey] = rec.mean_gain;
    payload[kMaxKey] = rec.max_gain;
    payload[kMinuteKey] = rec.minute_index;

    TelemetryPacket p;
    p.timestamp_ms = timestamp_ms;
    p.session_id = rec.session_id;
    p.label = rec.label;
    if (rec.status_only) p.silent = rec.silent;
    p.payload_b64 = base64::encode(payload.dump());
    return p;
}

std::string serialize(const TelemetryPacket& packet) {
    ordered_json env;
    env["schemaVersion"] = packet.schema_version;
    env["timestampMs"] = packet.timestamp_ms;
    env["sessionId"] = packet.session_id;
    if (packet.label) env["label"] = std::string(label_abbrev(*packet.label));
    if (packet.silent) env["status"] = ordered_json{{"silent", *packet.silent}};
    env["payload"] = packet.payload_b64;
    std::string line = env.dump(-1, ' ', false, json::error_handler_t::replace);
    line.push_back('\n');
    return line;
}

TelemetryPacket parse_packet(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    const json env = parse_json(line, PacketErrorKind::InvalidJson, "line");
    if (!env.is_object()) fail(PacketErrorKind::InvalidEnvelope, "envelope is not a JSON object");

    for (const auto& [key, _] : env.items()) {
        if (key != "schemaVersion" && key != "timestampMs" && key != "sessionId" && key != "label" &&
            key != "status" && key != "payload")
            fail(PacketErrorKind::UnexpectedKey, "envelope key '" + key + "'");
    }
    for (const char* key : {"schemaVersion", "timestampMs", "sessionId", "payload"}) {
        if (!env.contains(key)) fail(PacketErrorKind::MissingKey, std::string("envelope key '") + key + "'");
    }

    TelemetryPacket p;
    const auto& version = env["schemaVersion"];
    if (!version.is_number_integer()) fail(PacketErrorKind::InvalidEnvelope, "schemaVersion is not an integer");
    p.schema_version = version.get<int>();
    if (p.schema_version != kSchemaVersion)
        fail(PacketErrorKind::InvalidEnvelope, "unsupported schemaVersion " + std::to_string(p.schema_version));
    const auto& ts = env["timestampMs"];
    if (!ts.is_number_unsigned()) fail(PacketErrorKind::InvalidEnvelope, "timestampMs is not a non-negative integer");
    p.timestamp_ms = ts.get<std::uint64_t>();
    if (!env["sessionId"].is_string()) fail(PacketErrorKind::InvalidEnvelope, "sessionId is not a string");
    p.session_id = env["sessionId"].get<std::string>();
    if (!env["payload"].is_string()) fail(PacketErrorKind::InvalidEnvelope, "payload is not a string");
    p.payload_b64 = env["payload"].get<std::string>();
    if (env.contains("label")) {
        const auto& l = env["label"];
        std::optional<ActivityLabel> parsed;
        if (l.is_string()) parsed = parse_label(l.get<std::string>());
        if (!parsed) fail(PacketErrorKind::InvalidEnvelope, "label is not a known activity");
        p.label = parsed;
    }
    if (env.contains("status")) {
        const auto& s = env["status"];
        if (!s.is_object() || s.size() != 1 || !s.contains("silent") || !s["silent"].is_boolean())
            fail(PacketErrorKind::InvalidEnvelope, "status must be {\"silent\": bool}");
        p.silent = s["silent"].get<bool>();
    }
    return p;
}

TelemetryRecord decode_packet(std::string_view line, double g_max) {
    const TelemetryPacket p = parse_packet(line);
    const auto raw = base64::decode(p.payload_b64);
    if (!raw) fail(PacketErrorKind::InvalidBase64, "payload is not canonical base64");
    const std::string_view text(reinterpret_cast<const char*>(raw->data()), raw->size());
    const json payload = parse_json(text, PacketErrorKind::InvalidPayload, "payload");
    if (!payload.is_object()) fail(PacketErrorKind::InvalidPayload, "payload is not a JSON object");

    for (const char* key : {kMinKey, kMeanKey, kMaxKey, kMinuteKey}) {
        if (!payload.contains(key)) fail(PacketErrorKind::MissingKey, std::string("payload key '") + key + "'");
    }
    if (payload.size() != 4) {
        for (const auto& [key, _] : payload.items()) {
            if (key != kMinKey && key != kMeanKey && key != kMaxKey && key != kMinuteKey)
                fail(PacketErrorKind::UnexpectedKey, "payload key '" + key + "'");
        }
    }

    TelemetryRecord rec;
    rec.min_gain = gain_value(payload, kMinKey);
    rec.mean_gain = gain_value(payload, kMeanKey);
    rec.max_gain = gain_value(payload, kMaxKey);
    const auto& minute = payload[kMinuteKey];
    if (!minute.is_number_unsigned()) fail(PacketErrorKind::BadValue, "minuteIndex is not a non-negative integer");
    rec.minute_index = minute.get<std::uint64_t>();
    rec.session_id = p.session_id;
    rec.label = p.label;
    rec.status_only = p.silent.has_value();
    rec.silent = p.silent.value_or(false);

    if (rec.min_gain > rec.max_gain) fail(PacketErrorKind::GainOrder, "audioMinGain exceeds audioMaxGain");
    if (rec.mean_gain < rec.min_gain || rec.mean_gain > rec.max_gain)
        fail(PacketErrorKind::GainOrder, "audioMeanGain outside [audioMinGain, audioMaxGain]");
    if (rec.min_gain < 0.0 || rec.max_gain > g_max)
        fail(PacketErrorKind::GainRange, "gains outside [0, " + std::to_string(g_max) + "]");
    if (rec.status_only && (rec.min_gain != 0.0 || rec.max_gain != 0.0))
        fail(PacketErrorKind::BadValue, "status-only packet carries non-zero gains");
    return rec;
}

void write_stream(std::ostream& out, std::span<const TelemetryRecord> records, std::uint64_t start_ms) {
    for (const auto& rec : records) out << serialize(encode_packet(rec, start_ms + rec.minute_index * 60000));
}

StreamReadResult read_stream(std::istream& in, double g_max) {
    StreamReadResult result;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            result.records.push_back(decode_packet(line, g_max));
        } catch (const PacketError& e) {
            result.errors.push_back({number, e.kind(), e.what()});
        }
    }
    return result;
}

}  // namespace gainprint::telemetry
