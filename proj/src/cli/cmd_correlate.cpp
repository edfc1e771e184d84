#include <fmt/format.h>

#include <filesystem>

#include "common.hpp"
#include "gainprint/analysis.hpp"
#include "gainprint/audio.hpp"

namespace gainprint::cli {

namespace {

struct CorrelateOptions {
    std::string wav;
    AgcOverrides agc;
    std::string out;
};

int run_correlate(const CorrelateOptions& o, Context& ctx) {
    RunManifest m;
    m.command = "correlate";
    m.argv = ctx.argv;
    m.started_at = utc_timestamp();

    const auto cfg = o.agc.resolve();
    if (!std::filesystem::exists(o.wav)) throw InputError("input file not found: " + o.wav);
    audio::AudioClipSource src;
    try {
        src = audio::read_wav_file(o.wav);
    } catch (const Error& e) {
        throw InputError(o.wav + ": " + e.what());
    }
    src.source_id = std::filesystem::path(o.wav).stem().string();

    std::string doc;
    try {
        const auto power = audio::power_series(src, 60, cfg.frame_seconds);
        const auto records = telemetry::emulate_stream(src, telemetry::MutePolicy::ContinuousSampling, cfg);
        const auto r = analysis::gain_power_correlation(power, records);
        doc = analysis::correlation_json(power, records, r);
        ctx.out << fmt::format("{} minutes: r_mean {:.6f}, r_min {:.6f}", r.points, r.r_mean, r.r_min);
        if (r.r_mean_dba) ctx.out << fmt::format(", r_mean_dba {:.6f}", *r.r_mean_dba);
        ctx.out << '\n';
    } catch (const DomainError& e) {
        throw InputError(o.wav + ": " + e.what());
    }
    write_file_atomic(o.out, doc);

    m.inputs = {o.wav};
    m.outputs = {o.out};
    m.config = {{"agc", to_json(cfg)}};
    m.finished_at = utc_timestamp();
    write_manifest(m, o.out);
    return kExitOk;
}

}  // namespace

void register_correlate(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<CorrelateOptions>();
    auto* sub = app.add_subcommand("correlate", "Correlate per-minute input levels with emulated gains");
    sub->add_option("--wav", o->wav, "Input WAV file (at least 3 minutes)")->required();
    o->agc.add_to(*sub);
    sub->add_option("--out", o->out, "Output JSON with per-minute pairs and Pearson coefficients")->required();
    sub->callback([o, &ctx, &status] { status = run_correlate(*o, ctx); });
}

}  // namespace gainprint::cli
