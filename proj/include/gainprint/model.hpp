#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gainprint/dataset.hpp"
#include "gainprint/error.hpp"
#include "gainprint/kernels.hpp"
#include "gainprint/labels.hpp"
#include "gainprint/rng.hpp"

namespace gainprint::model {

/// conv(c1,k1) -> ReLU -> conv(c2,k2) -> ReLU -> flatten -> dense(d1) -> ReLU
/// -> dense(d2) -> ReLU -> dense(classes) -> softmax. Convolutions are valid
/// (no padding), stride 1.
struct NetworkSpec {
    std::size_t n = 7;
    std::size_t c1 = 32;
    std::size_t k1 = 3;
    std::size_t c2 = 64;
    std::size_t k2 = 3;
    std::size_t d1 = 128;
    std::size_t d2 = 64;
    std::size_t classes = kNumClasses;

    /// Throws ConfigError unless n >= k1 + k2 - 1, all sizes positive and
    /// classes == 6.
    void validate() const;

    std::size_t input_channels() const noexcept { return dataset::kRows; }
    std::size_t conv1_len() const noexcept { return n - k1 + 1; }
    std::size_t conv2_len() const noexcept { return conv1_len() - k2 + 1; }
    std::size_t flat_size() const noexcept { return c2 * conv2_len(); }

    bool operator==(const NetworkSpec&) const = default;
};

/// Offsets of each tensor inside the flat parameter vector. This is also the
/// on-disk order of a checkpoint.
struct ParamLayout {
    std::size_t conv1_w, conv1_b, conv2_w, conv2_b;
    std::size_t dense1_w, dense1_b, dense2_w, dense2_b, dense3_w, dense3_b;
    std::size_t total;

    explicit ParamLayout(const NetworkSpec& spec);
};

/// Per-row z-score statistics of the training clips (rows: max, mean, min).
struct Normalization {
    std::array<double, dataset::kRows> mean{0.0, 0.0, 0.0};
    std::array<double, dataset::kRows> stddev{1.0, 1.0, 1.0};

    static constexpr double kMinStd = 1e-8;
    static Normalization fit(std::span<const dataset::Clip> clips);
};

struct Model {
    NetworkSpec spec;
    Normalization norm;
    std::vector<double> params;

    Model() : Model(NetworkSpec{}) {}
    explicit Model(const NetworkSpec& s);

    ParamLayout layout() const { return ParamLayout(spec); }
};

/// Glorot-uniform weights, zero biases.
void init_uniform(Model& model, Rng& rng);

/// Raw clip values packed as [batch][3][n].
std::vector<double> pack_batch(std::span<const dataset::Clip> clips, std::size_t n);
std::vector<double> pack_batch(std::span<const dataset::Clip> clips, std::span<const std::size_t> indices,
                               std::size_t n);

/// Class probabilities, [batch][classes]. `input` holds raw (unnormalized)
/// values; the model's normalization is applied internally.
std::vector<double> forward(const Model& model, std::span<const double> input, std::size_t batch,
                            const kernels::Kernels& k = {});
std::vector<double> forward(const Model& model, std::span<const dataset::Clip> clips, const kernels::Kernels& k = {});

/// Mean of -log(max(p[true], 1e-12)) over the batch.
double cross_entropy(std::span<const double> probs, std::span<const int> labels, std::size_t classes);

/// Fills `grads` (same layout as model.params) with d(mean cross-entropy)/d(param)
/// and returns the loss.
double backward(const Model& model, std::span<const double> input, std::span<const int> labels, std::size_t batch,
                std::span<double> grads, const kernels::Kernels& k = {});

/// Gradient of the mean loss with respect to the pre-softmax logits.
std::vector<double> logit_gradient(std::span<const double> probs, std::span<const int> labels, std::size_t classes);

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamConfig& cfg);

inline constexpr std::array<std::size_t, 5> kBatchSizeGrid = {50, 500, 1000, 1500, 3000};

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 500;
    std::size_t max_epochs = 400;
    std::size_t patience = 25;
    std::uint64_t seed = 42;

    /// Throws ConfigError; batch_size must be one of kBatchSizeGrid.
    void validate() const;
};

struct EpochLog {
    std::size_t epoch = 0;  // 1-based
    double loss = 0.0;
    double val_accuracy = 0.0;
    double val_weighted_precision = 0.0;
    double score = 0.0;
};

struct TrainingLog {
    std::vector<EpochLog> epochs;
    std::size_t best_epoch = 0;
    double best_score = 0.0;
    std::size_t effective_batch_size = 0;
    bool stopped_early = false;
    std::vector<std::string> warnings;
};

struct TrainResult {
    Model model;
    TrainingLog log;
};

class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(std::size_t epoch, const std::string& what) : Error(what), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Seeded shuffle per epoch, Adam updates, and early stopping on
/// (validation weighted precision + validation accuracy) / 2. Returns the
/// parameters of the best-scoring epoch.
TrainResult train(std::span<const dataset::Clip> train_set, std::span<const dataset::Clip> val_set,
                  const NetworkSpec& spec, const TrainConfig& cfg, const kernels::Kernels& k = {},
                  const EpochCallback& on_epoch = {});

/// Header: epoch,loss,val_accuracy,val_weighted_precision,score
void write_training_log_csv(std::ostream& out, const TrainingLog& log);

/// Argmax per row; ties go to the lowest class code.
std::vector<int> argmax_rows(std::span<const double> probs, std::size_t classes);
std::vector<ActivityLabel> predict(const Model& model, std::span<const dataset::Clip> clips,
                                   const kernels::Kernels& k = {});

class CheckpointError : public FormatError {
public:
    using FormatError::FormatError;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout (little-endian):
///   "GPRT", u32 version, u32 n c1 k1 c2 k2 d1 d2 classes,
///   f32 norm mean[3] stddev[3], u32 param count, f32 params in ParamLayout
///   order, u32 CRC-32 of every preceding byte.
std::vector<std::uint8_t> checkpoint_bytes(const Model& model);
Model checkpoint_from_bytes(std::span<const std::uint8_t> bytes);
void checkpoint_save(const Model& model, const std::string& path);
Model checkpoint_load(const std::string& path);

}  // namespace gainprint::model
