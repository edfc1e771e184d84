#include <fmt/format.h>

#include <fstream>

#include "common.hpp"

namespace gainprint::cli {

namespace {

struct CaptureDecodeOptions {
    std::string in;
    std::string out;
    double g_max = telemetry::kDefaultGMax;
};

int run_capture_decode(const CaptureDecodeOptions& o, Context& ctx) {
    RunManifest m;
    m.command = "capture-decode";
    m.argv = ctx.argv;
    m.started_at = utc_timestamp();

    std::ifstream in(o.in);
    if (!in) throw InputError("cannot open " + o.in);
    const auto result = telemetry::read_stream(in, o.g_max);

    std::string csv = "session_id,label,minute_index,min_gain,mean_gain,max_gain,status_only,silent\n";
    for (const auto& r : result.records) {
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", r.session_id, r.label ? label_abbrev(*r.label) : "",
                           r.minute_index, r.min_gain, r.mean_gain, r.max_gain, r.status_only ? 1 : 0,
                           r.silent ? 1 : 0);
    }
    write_file_atomic(o.out, csv);
    for (const auto& e : result.errors) ctx.err << fmt::format("{}:{}: {}\n", o.in, e.line, e.message);
    ctx.out << fmt::format("decoded {} records, {} malformed lines\n", result.records.size(), result.errors.size());

    m.inputs = {o.in};
    m.outputs = {o.out};
    m.config = {{"g_max_db", o.g_max}, {"malformed_lines", result.errors.size()}};
    m.finished_at = utc_timestamp();
    write_manifest(m, o.out);
    return result.errors.empty() ? kExitOk : kExitPartialDecode;
}

}  // namespace

void register_capture_decode(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<CaptureDecodeOptions>();
    auto* sub = app.add_subcommand("capture-decode", "Decode a captured telemetry stream into a CSV of records");
    sub->add_option("--in", o->in, "Telemetry stream (JSONL)")->required();
    sub->add_option("--out", o->out, "Output CSV of decoded records")->required();
    sub->add_option("--g-max", o->g_max, "Upper bound accepted for gains in dB")->capture_default_str();
    sub->callback([o, &ctx, &status] { status = run_capture_decode(*o, ctx); });
}

}  // namespace gainprint::cli
