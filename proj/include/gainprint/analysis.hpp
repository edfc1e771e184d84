#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gainprint/audio.hpp"
#include "gainprint/error.hpp"
#include "gainprint/labels.hpp"
#include "gainprint/telemetry.hpp"

namespace gainprint::analysis {

/// Square count matrix, rows = true class, columns = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes = kNumClasses);
    static ConfusionMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows);

    std::size_t classes() const noexcept { return classes_; }
    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * classes_ + predicted]; }
    void add(std::size_t truth, std::size_t predicted, std::uint64_t count = 1);

    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t col_sum(std::size_t predicted) const;
    std::uint64_t total() const;
    bool is_diagonal() const;

    /// Each row divided by its sum; empty rows stay zero.
    std::vector<std::vector<double>> row_normalized() const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t classes_;
    std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                          std::size_t classes = kNumClasses);
ConfusionMatrix confusion(std::span<const ActivityLabel> truth, std::span<const ActivityLabel> predicted);

/// Fraction of all examples on the diagonal.
double accuracy(const ConfusionMatrix& cm);

/// Mean per-class recall over classes that occur in the ground truth.
double macro_accuracy(const ConfusionMatrix& cm);

std::vector<double> per_class_recall(const ConfusionMatrix& cm);

struct PrecisionReport {
    std::vector<double> precision;
    /// Classes that were never predicted; their precision is reported as 0.
    std::vector<bool> undefined;
    bool any_undefined() const;
};

PrecisionReport per_class_precision(const ConfusionMatrix& cm);

/// Per-class precision averaged with the given weights (normalized by their
/// sum). The default weights are the true-class proportions.
double weighted_precision(const ConfusionMatrix& cm, std::span<const double> weights);
double weighted_precision(const ConfusionMatrix& cm);

/// Unweighted mean precision over classes present in truth or predictions.
double macro_precision(const ConfusionMatrix& cm);

struct EvaluationReport {
    ConfusionMatrix cm;
    double accuracy = 0.0;
    double macro_accuracy = 0.0;
    double weighted_precision = 0.0;
    double macro_precision = 0.0;
    std::vector<double> recall;
    PrecisionReport precision;
};

EvaluationReport evaluate(std::span<const ActivityLabel> truth, std::span<const ActivityLabel> predicted);

/// Reference values reported for the original telemetry corpus. These are
/// never asserted against; they travel with measured metrics so any gap is
/// visible in the output.
struct PaperReference {
    static constexpr double kHeadlineMacroAccuracy = 0.819;
    static constexpr double kValPrecisionN3 = 0.9226;
    static constexpr double kValPrecisionN5 = 0.9298;
    static constexpr double kValPrecisionN7 = 0.9613;
    static constexpr double kValPrecisionN10 = 0.9690;
    static constexpr double kEval1MacroAccuracyN7 = 0.7775;
    static constexpr double kEval2MacroAccuracyN7 = 0.8903;
    static constexpr double kEval1MacroPrecisionN7 = 0.7307;
    static constexpr double kEval2MacroPrecisionN7 = 0.8747;
    static constexpr double kEval1MacroAccuracyN3 = 0.7870;
    static constexpr double kEval2MacroAccuracyN3 = 0.7848;
    static constexpr double kEval1MacroPrecisionN3 = 0.7935;
    static constexpr double kEval2MacroPrecisionN3 = 0.8435;
};

/// metrics.json document: measured values, the reference block, and the
/// measured-minus-reference differences.
std::string metrics_json(const EvaluationReport& report, const std::string& dataset_name, std::size_t window);

/// Confusion counts as CSV with a `true\predicted` header row of class
/// abbreviations; `normalized` writes row fractions instead.
std::string confusion_csv(const ConfusionMatrix& cm, bool normalized = false);

class UndefinedCorrelationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Pearson correlation; throws UndefinedCorrelationError on zero variance and
/// DomainError on length mismatch or fewer than 3 points.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationResult {
    /// Per-minute mean frame level vs mean gain.
    double r_mean = 0.0;
    /// Per-minute max frame level vs min gain.
    double r_min = 0.0;
    /// Per-minute A-weighted level vs mean gain, when defined.
    std::optional<double> r_mean_dba;
    std::size_t points = 0;
};

CorrelationResult gain_power_correlation(const audio::PowerSeries& power,
                                         std::span<const telemetry::TelemetryRecord> records);

/// Per-minute pairs plus coefficients, for plotting.
std::string correlation_json(const audio::PowerSeries& power, std::span<const telemetry::TelemetryRecord> records,
                             const CorrelationResult& result);

}  // namespace gainprint::analysis
