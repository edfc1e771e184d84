#include <filesystem>
#include <sstream>

#include "common.hpp"
#include "gainprint/audio.hpp"

namespace gainprint::cli {

namespace {

struct EmulateOptions {
    std::vector<std::string> inputs;
    std::string label;
    std::string policy = "continuous";
    AgcOverrides agc;
    std::uint64_t start_ms = 0;
    std::string out;
};

int run_emulate(const EmulateOptions& o, Context& ctx) {
    RunManifest m;
    m.command = "emulate";
    m.argv = ctx.argv;
    m.started_at = utc_timestamp();

    const auto policy = telemetry::parse_mute_policy(o.policy);
    if (!policy) throw InputError("unknown --policy '" + o.policy + "' (continuous, status-flags, software-mute)");
    std::optional<ActivityLabel> label;
    if (!o.label.empty()) {
        label = parse_label(o.label);
        if (!label) throw InputError("unknown --label '" + o.label + "'");
    }
    const auto cfg = o.agc.resolve();

    std::ostringstream stream;
    std::size_t total = 0;
    for (const auto& path : o.inputs) {
        if (!std::filesystem::exists(path)) throw InputError("input file not found: " + path);
        audio::AudioClipSource src;
        try {
            src = audio::read_wav_file(path);
        } catch (const Error& e) {
            throw InputError(path + ": " + e.what());
        }
        src.source_id = std::filesystem::path(path).stem().string();
        src.label = label;
        std::vector<telemetry::TelemetryRecord> records;
        try {
            records = telemetry::emulate_stream(src, *policy, cfg);
        } catch (const DomainError& e) {
            throw InputError(path + ": " + e.what());
        }
        telemetry::write_stream(stream, records, o.start_ms);
        total += records.size();
        m.inputs.push_back(path);
    }
    write_file_atomic(o.out, stream.str());
    ctx.out << "wrote " << total << " telemetry packets to " << o.out << '\n';

    m.outputs = {o.out};
    m.config = {{"policy", std::string(telemetry::to_string(*policy))},
                {"label", label ? nlohmann::ordered_json(std::string(label_abbrev(*label))) : nlohmann::ordered_json(nullptr)},
                {"agc", to_json(cfg)},
                {"start_ms", o.start_ms}};
    m.finished_at = utc_timestamp();
    write_manifest(m, o.out);
    return kExitOk;
}

}  // namespace

void register_emulate(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<EmulateOptions>();
    auto* sub = app.add_subcommand("emulate", "Emulate muted-client telemetry packets from WAV audio");
    sub->add_option("--in", o->inputs, "Input WAV files (16-bit PCM or 32-bit float, mono/stereo)")->required();
    sub->add_option("--label", o->label, "Activity label stamped on every packet (cm, ck, tk, dg, kb, vc)");
    sub->add_option("--policy", o->policy, "Mute policy: continuous, status-flags or software-mute")
        ->capture_default_str();
    o->agc.add_to(*sub);
    sub->add_option("--start-ms", o->start_ms, "Timestamp of minute 0 in milliseconds")->capture_default_str();
    sub->add_option("--out", o->out, "Output telemetry stream (JSONL)")->required();
    sub->callback([o, &ctx, &status] { status = run_emulate(*o, ctx); });
}

}  // namespace gainprint::cli
