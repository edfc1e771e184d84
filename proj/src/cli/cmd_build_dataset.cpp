#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "gainprint/dataset.hpp"

namespace gainprint::cli {

namespace {

struct BuildDatasetOptions {
    std::string streams;
    std::string split;
    std::size_t window = 7;
    std::optional<std::uint64_t> seed;
    std::optional<double> dev_fraction;
    std::string unit;
    double g_max = telemetry::kDefaultGMax;
    std::string out;
};

std::string clips_csv(std::span<const dataset::Clip> clips, std::size_t n) {
    std::ostringstream s;
    dataset::write_clips_csv(s, clips, n);
    return s.str();
}

int run_build_dataset(const BuildDatasetOptions& o, Context& ctx) {
    namespace fs = std::filesystem;
    RunManifest m;
    m.command = "build-dataset";
    m.started_at = utc_timestamp();
    const std::uint64_t seed = resolve_seed(o.seed, 42);
    m.seed = seed;
    m.argv = ctx.argv;
    if (!o.seed) m.argv.insert(m.argv.end(), {"--seed", std::to_string(seed)});

    if (!fs::is_directory(o.streams)) throw InputError("--streams is not a directory: " + o.streams);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(o.streams))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InputError("no .jsonl streams in " + o.streams);

    std::vector<telemetry::TelemetryRecord> records;
    std::size_t bad_lines = 0;
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open " + path);
        auto result = telemetry::read_stream(in, o.g_max);
        for (const auto& e : result.errors) ctx.err << fmt::format("{}:{}: {}\n", path, e.line, e.message);
        bad_lines += result.errors.size();
        std::move(result.records.begin(), result.records.end(), std::back_inserter(records));
        m.inputs.push_back(path);
    }
    if (bad_lines > 0) throw InputError(fmt::format("{} malformed telemetry lines", bad_lines));

    dataset::SplitSpec spec;
    try {
        if (!o.split.empty()) {
            spec = dataset::parse_split_spec(read_text_file(o.split));
            m.inputs.push_back(o.split);
        }
        if (o.dev_fraction) spec.dev_fraction_train = *o.dev_fraction;
        if (o.unit == "clip") spec.unit = dataset::SplitUnit::Clip;
        else if (o.unit == "source") spec.unit = dataset::SplitUnit::Source;
        else if (!o.unit.empty()) throw InputError("--unit must be 'clip' or 'source'");
        spec.validate();
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    }

    dataset::DatasetSplits splits;
    try {
        const auto streams = dataset::group_streams(records);
        splits = dataset::build_splits(streams, spec, o.window, seed);
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }

    std::vector<dataset::Clip> all;
    const auto append = [&](const std::vector<dataset::Clip>& c) { all.insert(all.end(), c.begin(), c.end()); };
    append(splits.train);
    append(splits.val);
    for (const auto& [_, c] : splits.evaluation) append(c);

    const std::string train_path = sibling_path(o.out, "train.csv");
    const std::string val_path = sibling_path(o.out, "val.csv");
    const std::string splits_path = sibling_path(o.out, "splits.json");
    write_file_atomic(o.out, clips_csv(all, o.window));
    write_file_atomic(train_path, clips_csv(splits.train, o.window));
    write_file_atomic(val_path, clips_csv(splits.val, o.window));
    m.outputs = {o.out, train_path, val_path};
    for (const auto& [name, clips] : splits.evaluation) {
        const auto path = sibling_path(o.out, name + ".csv");
        write_file_atomic(path, clips_csv(clips, o.window));
        m.outputs.push_back(path);
    }
    write_file_atomic(splits_path, dataset::split_manifest_json(splits) + "\n");
    m.outputs.push_back(splits_path);

    ctx.out << dataset::format_distribution_table(splits);

    m.config = {{"window", o.window},
                {"g_max_db", o.g_max},
                {"split", nlohmann::ordered_json::parse(dataset::split_spec_to_json(spec))}};
    m.finished_at = utc_timestamp();
    write_manifest(m, o.out);
    return kExitOk;
}

}  // namespace

void register_build_dataset(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<BuildDatasetOptions>();
    auto* sub = app.add_subcommand(
        "build-dataset",
        "Window labeled telemetry streams into clip datasets.\n"
        "Writes --out with every clip plus <stem>.train.csv, <stem>.val.csv, <stem>.<eval>.csv and "
        "<stem>.splits.json next to it");
    sub->add_option("--streams", o->streams, "Directory of labeled telemetry streams (*.jsonl)")->required();
    sub->add_option("--split", o->split, "Split spec JSON (dev_fraction_train, unit, development, evaluation)");
    sub->add_option("--window", o->window, "Clip length n in minutes")->capture_default_str();
    sub->add_option("--seed", o->seed, "Shuffle seed (falls back to GAINPRINT_SEED, then 42)");
    sub->add_option("--dev-fraction", o->dev_fraction, "Override the training fraction of the development set");
    sub->add_option("--unit", o->unit, "Override the train/val split unit: clip or source");
    sub->add_option("--g-max", o->g_max, "Upper bound accepted for gains in dB")->capture_default_str();
    sub->add_option("--out", o->out, "Output dataset CSV")->required();
    sub->callback([o, &ctx, &status] { status = run_build_dataset(*o, ctx); });
}

}  // namespace gainprint::cli
