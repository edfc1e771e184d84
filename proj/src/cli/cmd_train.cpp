#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "gainprint/dataset.hpp"

namespace gainprint::cli {

namespace {

struct TrainOptions {
    std::string dataset;
    std::string net;
    std::string train_cfg;
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> patience;
    std::optional<double> learning_rate;
    std::optional<std::uint64_t> seed;
    std::string backend = "parallel";
    bool quiet = false;
    std::string out;
    std::string log;
};

std::vector<dataset::Clip> load_clips(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return dataset::read_clips_csv(in);
    } catch (const FormatError& e) {
        throw InputError(path + ": " + e.what());
    }
}

int run_train(const TrainOptions& o, Context& ctx) {
    RunManifest m;
    m.command = "train";
    m.started_at = utc_timestamp();

    const std::string train_path = sibling_path(o.dataset, "train.csv");
    const std::string val_path = sibling_path(o.dataset, "val.csv");
    const auto train_set = load_clips(train_path);
    const auto val_set = load_clips(val_path);
    if (train_set.empty() || val_set.empty()) throw InputError("training and validation sets must be non-empty");
    m.inputs = {train_path, val_path};

    model::NetworkSpec spec;
    spec.n = train_set.front().n;
    if (!o.net.empty()) {
        spec = parse_network_spec(load_json_file(o.net), spec);
        m.inputs.push_back(o.net);
        if (spec.n != train_set.front().n)
            throw InputError(fmt::format("network window {} does not match dataset window {}", spec.n, train_set.front().n));
    }
    model::TrainConfig cfg;
    if (!o.train_cfg.empty()) {
        cfg = parse_train_config(load_json_file(o.train_cfg));
        m.inputs.push_back(o.train_cfg);
    }
    if (o.batch_size) cfg.batch_size = *o.batch_size;
    if (o.epochs) cfg.max_epochs = *o.epochs;
    if (o.patience) cfg.patience = *o.patience;
    if (o.learning_rate) cfg.learning_rate = *o.learning_rate;
    const bool seed_in_file = !o.train_cfg.empty() && load_json_file(o.train_cfg).contains("seed");
    if (o.seed || !seed_in_file) cfg.seed = resolve_seed(o.seed, cfg.seed);
    m.seed = cfg.seed;
    m.argv = ctx.argv;
    if (!o.seed) m.argv.insert(m.argv.end(), {"--seed", std::to_string(cfg.seed)});

    kernels::Kernels k;
    if (o.backend == "serial") k.backend = kernels::Backend::Serial;
    else if (o.backend != "parallel") throw InputError("--backend must be 'serial' or 'parallel'");

    model::TrainResult result;
    try {
        spec.validate();
        cfg.validate();
        result = model::train(train_set, val_set, spec, cfg, k, [&](const model::EpochLog& e) {
            if (!o.quiet && (e.epoch == 1 || e.epoch % 10 == 0))
                ctx.err << fmt::format("epoch {:>4} loss {:.5f} val_acc {:.4f} val_wprec {:.4f} score {:.4f}\n",
                                       e.epoch, e.loss, e.val_accuracy, e.val_weighted_precision, e.score);
        });
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }
    for (const auto& w : result.log.warnings) ctx.err << "warning: " << w << '\n';

    write_file_atomic(o.out, model::checkpoint_bytes(result.model));
    std::ostringstream log;
    model::write_training_log_csv(log, result.log);
    write_file_atomic(o.log, log.str());
    ctx.out << fmt::format("best epoch {} score {:.6f} ({} epochs run{})\n", result.log.best_epoch,
                           result.log.best_score, result.log.epochs.size(),
                           result.log.stopped_early ? ", stopped early" : "");

    m.outputs = {o.out, o.log};
    m.config = {{"network", to_json(spec)},
                {"train", to_json(cfg)},
                {"effective_batch_size", result.log.effective_batch_size},
                {"backend", o.backend}};
    m.finished_at = utc_timestamp();
    write_manifest(m, o.out);
    return kExitOk;
}

}  // namespace

void register_train(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<TrainOptions>();
    auto* sub = app.add_subcommand("train", "Train the activity classifier on a built dataset");
    sub->add_option("--dataset", o->dataset,
                    "Dataset CSV from build-dataset; its <stem>.train.csv and <stem>.val.csv are used")
        ->required();
    sub->add_option("--net", o->net, "Network spec JSON (c1, k1, c2, k2, d1, d2)");
    sub->add_option("--train", o->train_cfg, "Training config JSON (learning_rate, batch_size, max_epochs, patience, seed)");
    sub->add_option("--batch-size", o->batch_size, "Override batch size (50, 500, 1000, 1500 or 3000)");
    sub->add_option("--epochs", o->epochs, "Override maximum epochs");
    sub->add_option("--patience", o->patience, "Override early-stopping patience in epochs");
    sub->add_option("--lr", o->learning_rate, "Override learning rate");
    sub->add_option("--seed", o->seed, "Initialization and shuffle seed (falls back to GAINPRINT_SEED)");
    sub->add_option("--backend", o->backend, "Kernel backend: parallel or serial")->capture_default_str();
    sub->add_flag("--quiet", o->quiet, "Do not print per-epoch progress");
    sub->add_option("--out", o->out, "Output checkpoint")->required();
    sub->add_option("--log", o->log, "Output training log CSV")->required();
    sub->callback([o, &ctx, &status] { status = run_train(*o, ctx); });
}

}  // namespace gainprint::cli
