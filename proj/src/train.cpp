#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "gainprint/analysis.hpp"
#include "gainprint/model.hpp"

namespace gainprint::model {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train: learning_rate must be positive");
    if (std::find(kBatchSizeGrid.begin(), kBatchSizeGrid.end(), batch_size) == kBatchSizeGrid.end())
        throw ConfigError(fmt::format("train: batch_size {} is not one of 50, 500, 1000, 1500, 3000", batch_size));
    if (max_epochs == 0) throw ConfigError("train: max_epochs must be positive");
    if (patience == 0) throw ConfigError("train: patience must be positive");
}

namespace {

std::vector<int> codes_of(std::span<const dataset::Clip> clips) {
    std::vector<int> out(clips.size());
    std::transform(clips.begin(), clips.end(), out.begin(), [](const auto& c) { return label_code(c.label); });
    return out;
}

}  // namespace

TrainResult train(std::span<const dataset::Clip> train_set, std::span<const dataset::Clip> val_set,
                  const NetworkSpec& spec, const TrainConfig& cfg, const kernels::Kernels& k,
                  const EpochCallback& on_epoch) {
    spec.validate();
    cfg.validate();
    if (train_set.empty()) throw DomainError("train: empty training set");
    if (val_set.empty()) throw DomainError("train: empty validation set");
    for (const auto* set : {&train_set, &val_set})
        for (const auto& c : *set)
            if (c.n != spec.n)
                throw DomainError(fmt::format("train: clip window {} does not match network window {}", c.n, spec.n));

    TrainResult result{Model(spec), {}};
    auto& log = result.log;
    Model& model = result.model;
    model.norm = Normalization::fit(train_set);

    Rng rng(cfg.seed);
    init_uniform(model, rng);

    std::size_t batch_size = cfg.batch_size;
    if (batch_size > train_set.size()) {
        log.warnings.push_back(fmt::format("batch size {} exceeds the {} training clips; clamped", batch_size,
                                           train_set.size()));
        batch_size = train_set.size();
    }
    log.effective_batch_size = batch_size;

    const auto train_labels = codes_of(train_set);
    const auto val_input = pack_batch(val_set, spec.n);
    std::vector<ActivityLabel> val_truth(val_set.size());
    std::transform(val_set.begin(), val_set.end(), val_truth.begin(), [](const auto& c) { return c.label; });

    AdamState state(model.params.size());
    const AdamConfig adam{cfg.learning_rate};
    std::vector<double> grads(model.params.size());
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<int> batch_labels;

    std::vector<double> best_params = model.params;
    double best_score = -1.0;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(std::span(order));
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t stop = std::min(order.size(), start + batch_size);
            const std::span<const std::size_t> idx(order.data() + start, stop - start);
            const auto input = pack_batch(train_set, idx, spec.n);
            batch_labels.resize(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) batch_labels[i] = train_labels[idx[i]];
            const double loss = backward(model, input, batch_labels, idx.size(), grads, k);
            if (!std::isfinite(loss))
                throw TrainingDivergedError(epoch, fmt::format("training diverged: non-finite loss in epoch {}", epoch));
            loss_sum += loss * static_cast<double>(idx.size());
            adam_step(model.params, grads, state, adam);
        }

        const auto probs = forward(model, val_input, val_set.size(), k);
        const auto codes = argmax_rows(probs, spec.classes);
        std::vector<ActivityLabel> predicted(codes.size());
        std::transform(codes.begin(), codes.end(), predicted.begin(), [](int c) { return static_cast<ActivityLabel>(c); });
        const auto cm = analysis::confusion(val_truth, predicted);

        EpochLog e;
        e.epoch = epoch;
        e.loss = loss_sum / static_cast<double>(order.size());
        e.val_accuracy = analysis::accuracy(cm);
        e.val_weighted_precision = analysis::weighted_precision(cm);
        e.score = 0.5 * (e.val_accuracy + e.val_weighted_precision);
        log.epochs.push_back(e);
        if (on_epoch) on_epoch(e);

        if (e.score > best_score) {
            best_score = e.score;
            best_params = model.params;
            log.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            log.stopped_early = true;
            break;
        }
    }

    model.params = std::move(best_params);
    log.best_score = best_score;
    return result;
}

void write_training_log_csv(std::ostream& out, const TrainingLog& log) {
    out << "epoch,loss,val_accuracy,val_weighted_precision,score\n";
    for (const auto& e : log.epochs)
        out << fmt::format("{},{},{},{},{}\n", e.epoch, e.loss, e.val_accuracy, e.val_weighted_precision, e.score);
}

}  // namespace gainprint::model
