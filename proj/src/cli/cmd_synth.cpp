#include <fmt/format.h>

#include <filesystem>

#include "common.hpp"
#include "gainprint/rng.hpp"
#include "gainprint/synth.hpp"

namespace gainprint::cli {

namespace {

struct SynthOptions {
    std::string out_dir;
    std::string kind = "activity";
    std::vector<std::string> classes;
    std::size_t sources_per_class = 4;
    std::size_t minutes = 10;
    int rate = 16000;
    double offset_range_db = 3.0;
    std::optional<std::uint64_t> seed;
};

int run_synth(const SynthOptions& o, Context& ctx) {
    namespace fs = std::filesystem;
    RunManifest m;
    m.command = "synth";
    m.started_at = utc_timestamp();
    const std::uint64_t seed = resolve_seed(o.seed, 42);
    m.seed = seed;
    m.argv = ctx.argv;
    if (!o.seed) m.argv.insert(m.argv.end(), {"--seed", std::to_string(seed)});

    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (!fs::is_directory(o.out_dir)) throw InputError("--out-dir is not a directory: " + o.out_dir);
    if (!audio::is_supported_rate(o.rate)) throw InputError(fmt::format("unsupported --rate {}", o.rate));
    if (o.minutes == 0) throw InputError("--minutes must be positive");

    std::string primary;
    if (o.kind == "am-noise") {
        const auto src = synth::amplitude_modulated_noise(o.minutes, o.rate, seed);
        primary = (fs::path(o.out_dir) / "am_noise.wav").string();
        write_file_atomic(primary, audio::encode_wav(src.samples, o.rate));
        m.outputs.push_back(primary);
    } else if (o.kind == "activity") {
        std::vector<ActivityLabel> labels;
        if (o.classes.empty()) labels.assign(kAllLabels.begin(), kAllLabels.end());
        for (const auto& c : o.classes) {
            const auto l = parse_label(c);
            if (!l) throw InputError("unknown class '" + c + "'");
            labels.push_back(*l);
        }
        Rng rng(seed);
        for (ActivityLabel l : labels) {
            for (std::size_t i = 0; i < o.sources_per_class; ++i) {
                const std::uint64_t source_seed = rng.next();
                const double offset = rng.uniform(-o.offset_range_db, o.offset_range_db);
                const auto src = synth::synthesize_activity(l, o.minutes, o.rate, source_seed, offset);
                const auto path = (fs::path(o.out_dir) / fmt::format("{}_{:02}.wav", label_abbrev(l), i)).string();
                write_file_atomic(path, audio::encode_wav(src.samples, o.rate));
                m.outputs.push_back(path);
            }
        }
        primary = (fs::path(o.out_dir) / "synth").string();
    } else {
        throw InputError("--kind must be 'activity' or 'am-noise'");
    }
    ctx.out << fmt::format("wrote {} files to {}\n", m.outputs.size(), o.out_dir);

    m.config = {{"kind", o.kind},
                {"sources_per_class", o.sources_per_class},
                {"minutes", o.minutes},
                {"rate", o.rate},
                {"offset_range_db", o.offset_range_db}};
    m.finished_at = utc_timestamp();
    write_manifest(m, primary);
    return kExitOk;
}

}  // namespace

void register_synth(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<SynthOptions>();
    auto* sub = app.add_subcommand("synth", "Generate a synthetic background-activity audio corpus");
    sub->add_option("--out-dir", o->out_dir, "Directory for the generated WAV files (created if missing)")->required();
    sub->add_option("--kind", o->kind, "activity (per-class corpus) or am-noise (correlation probe)")
        ->capture_default_str();
    sub->add_option("--classes", o->classes, "Classes to generate (default: all six)");
    sub->add_option("--sources-per-class", o->sources_per_class, "Sources per class")->capture_default_str();
    sub->add_option("--minutes", o->minutes, "Minutes per source")->capture_default_str();
    sub->add_option("--rate", o->rate, "Sample rate: 16000, 44100 or 48000")->capture_default_str();
    sub->add_option("--offset-range", o->offset_range_db, "Per-source level offset range in dB (+/-)")
        ->capture_default_str();
    sub->add_option("--seed", o->seed, "Generator seed (falls back to GAINPRINT_SEED, then 42)");
    sub->callback([o, &ctx, &status] { status = run_synth(*o, ctx); });
}

}  // namespace gainprint::cli
