#include <fmt/format.h>

#include <filesystem>
#include <fstream>

#include "common.hpp"
#include "gainprint/analysis.hpp"
#include "gainprint/dataset.hpp"

namespace gainprint::cli {

namespace {

struct EvalOptions {
    std::string model;
    std::string dataset;
    std::string name;
    std::string out;
    std::string confusion;
};

int run_eval(const EvalOptions& o, Context& ctx) {
    RunManifest m;
    m.command = "eval";
    m.argv = ctx.argv;
    m.started_at = utc_timestamp();

    model::Model net;
    try {
        net = model::checkpoint_load(o.model);
    } catch (const Error& e) {
        throw InputError(o.model + ": " + e.what());
    }
    std::ifstream in(o.dataset);
    if (!in) throw InputError("cannot open " + o.dataset);
    std::vector<dataset::Clip> clips;
    try {
        clips = dataset::read_clips_csv(in);
    } catch (const FormatError& e) {
        throw InputError(o.dataset + ": " + e.what());
    }
    if (clips.empty()) throw InputError(o.dataset + " holds no clips");
    if (clips.front().n != net.spec.n)
        throw InputError(fmt::format("model window {} does not match dataset window {}", net.spec.n, clips.front().n));

    const auto predicted = model::predict(net, clips);
    std::vector<ActivityLabel> truth(clips.size());
    std::transform(clips.begin(), clips.end(), truth.begin(), [](const auto& c) { return c.label; });
    const auto report = analysis::evaluate(truth, predicted);

    const std::string name = o.name.empty() ? std::filesystem::path(o.dataset).stem().string() : o.name;
    write_file_atomic(o.out, analysis::metrics_json(report, name, net.spec.n));
    m.outputs = {o.out};
    if (!o.confusion.empty()) {
        write_file_atomic(o.confusion, analysis::confusion_csv(report.cm));
        m.outputs.push_back(o.confusion);
    }
    ctx.out << fmt::format("{}: {} clips, accuracy {:.4f}, macro accuracy {:.4f}, weighted precision {:.4f}, "
                           "macro precision {:.4f}\n",
                           name, clips.size(), report.accuracy, report.macro_accuracy, report.weighted_precision,
                           report.macro_precision);
    ctx.out << analysis::confusion_csv(report.cm);
    if (report.precision.any_undefined())
        ctx.err << "warning: some classes were never predicted; their precision is reported as 0\n";

    m.inputs = {o.model, o.dataset};
    m.config = {{"name", name}, {"window", net.spec.n}};
    m.finished_at = utc_timestamp();
    write_manifest(m, o.out);
    return kExitOk;
}

}  // namespace

void register_eval(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<EvalOptions>();
    auto* sub = app.add_subcommand("eval", "Evaluate a checkpoint on a clip dataset");
    sub->add_option("--model", o->model, "Checkpoint written by train")->required();
    sub->add_option("--dataset", o->dataset, "Clip CSV to evaluate (e.g. <stem>.eval1.csv)")->required();
    sub->add_option("--name", o->name, "Dataset name recorded in metrics.json (default: file stem)");
    sub->add_option("--out", o->out, "Output metrics JSON")->required();
    sub->add_option("--confusion", o->confusion, "Output confusion matrix CSV");
    sub->callback([o, &ctx, &status] { status = run_eval(*o, ctx); });
}

}  // namespace gainprint::cli
