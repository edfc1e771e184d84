#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "gainprint/analysis.hpp"
#include "json.hpp"

namespace gainprint::analysis {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {
    if (classes == 0) throw DomainError("confusion matrix needs at least one class");
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
    ConfusionMatrix cm(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t].size() != rows.size()) throw DomainError("confusion matrix must be square");
        for (std::size_t p = 0; p < rows.size(); ++p) cm.add(t, p, rows[t][p]);
    }
    return cm;
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t count) {
    if (truth >= classes_ || predicted >= classes_) throw DomainError("confusion: label out of range");
    counts_[truth * classes_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < classes_; ++p) s += at(truth, p);
    return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
    std::uint64_t s = 0;
    for (std::size_t t = 0; t < classes_; ++t) s += at(t, predicted);
    return s;
}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

bool ConfusionMatrix::is_diagonal() const {
    for (std::size_t t = 0; t < classes_; ++t)
        for (std::size_t p = 0; p < classes_; ++p)
            if (t != p && at(t, p) != 0) return false;
    return true;
}

std::vector<std::vector<double>> ConfusionMatrix::row_normalized() const {
    std::vector<std::vector<double>> out(classes_, std::vector<double>(classes_, 0.0));
    for (std::size_t t = 0; t < classes_; ++t) {
        const auto sum = row_sum(t);
        if (sum == 0) continue;
        for (std::size_t p = 0; p < classes_; ++p)
            out[t][p] = static_cast<double>(at(t, p)) / static_cast<double>(sum);
    }
    return out;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t classes) {
    if (truth.size() != predicted.size()) throw DomainError("confusion: label sequences differ in length");
    ConfusionMatrix cm(classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || predicted[i] < 0) throw DomainError("confusion: negative label");
        cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
    }
    return cm;
}

ConfusionMatrix confusion(std::span<const ActivityLabel> truth, std::span<const ActivityLabel> predicted) {
    if (truth.size() != predicted.size()) throw DomainError("confusion: label sequences differ in length");
    ConfusionMatrix cm(kNumClasses);
    for (std::size_t i = 0; i < truth.size(); ++i)
        cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0) return 0.0;
    std::uint64_t diag = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) diag += cm.at(c, c);
    return static_cast<double>(diag) / static_cast<double>(total);
}

std::vector<double> per_class_recall(const ConfusionMatrix& cm) {
    std::vector<double> out(cm.classes(), 0.0);
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        const auto sum = cm.row_sum(c);
        if (sum > 0) out[c] = static_cast<double>(cm.at(c, c)) / static_cast<double>(sum);
    }
    return out;
}

double macro_accuracy(const ConfusionMatrix& cm) {
    const auto recall = per_class_recall(cm);
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        if (cm.row_sum(c) == 0) continue;
        sum += recall[c];
        ++present;
    }
    return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

bool PrecisionReport::any_undefined() const {
    return std::find(undefined.begin(), undefined.end(), true) != undefined.end();
}

PrecisionReport per_class_precision(const ConfusionMatrix& cm) {
    PrecisionReport r;
    r.precision.assign(cm.classes(), 0.0);
    r.undefined.assign(cm.classes(), false);
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        const auto predicted = cm.col_sum(c);
        if (predicted == 0) {
            r.undefined[c] = true;
            continue;
        }
        r.precision[c] = static_cast<double>(cm.at(c, c)) / static_cast<double>(predicted);
    }
    return r;
}

double weighted_precision(const ConfusionMatrix& cm, std::span<const double> weights) {
    if (weights.size() != cm.classes()) throw DomainError("weighted_precision: one weight per class required");
    const auto p = per_class_precision(cm);
    double wsum = 0.0;
    double acc = 0.0;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        if (weights[c] < 0.0) throw DomainError("weighted_precision: negative weight");
        wsum += weights[c];
        acc += weights[c] * p.precision[c];
    }
    return wsum > 0.0 ? acc / wsum : 0.0;
}

double weighted_precision(const ConfusionMatrix& cm) {
    std::vector<double> w(cm.classes());
    for (std::size_t c = 0; c < cm.classes(); ++c) w[c] = static_cast<double>(cm.row_sum(c));
    return weighted_precision(cm, w);
}

double macro_precision(const ConfusionMatrix& cm) {
    const auto p = per_class_precision(cm);
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        if (cm.row_sum(c) == 0 && cm.col_sum(c) == 0) continue;
        sum += p.precision[c];
        ++used;
    }
    return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

EvaluationReport evaluate(std::span<const ActivityLabel> truth, std::span<const ActivityLabel> predicted) {
    EvaluationReport r;
    r.cm = confusion(truth, predicted);
    r.accuracy = accuracy(r.cm);
    r.macro_accuracy = macro_accuracy(r.cm);
    r.weighted_precision = weighted_precision(r.cm);
    r.macro_precision = macro_precision(r.cm);
    r.recall = per_class_recall(r.cm);
    r.precision = per_class_precision(r.cm);
    return r;
}

std::string metrics_json(const EvaluationReport& report, const std::string& dataset_name, std::size_t window) {
    using nlohmann::ordered_json;
    using R = PaperReference;
    ordered_json j;
    j["dataset"] = dataset_name;
    j["window"] = window;
    j["examples"] = report.cm.total();

    ordered_json measured;
    measured["accuracy"] = report.accuracy;
    measured["macro_accuracy"] = report.macro_accuracy;
    measured["weighted_precision"] = report.weighted_precision;
    measured["macro_precision"] = report.macro_precision;
    ordered_json per_class = ordered_json::array();
    ordered_json warnings = ordered_json::array();
    for (std::size_t c = 0; c < report.cm.classes(); ++c) {
        const auto abbrev = c < kNumClasses ? std::string(label_abbrev(static_cast<ActivityLabel>(c))) : std::to_string(c);
        per_class.push_back({{"class", abbrev},
                             {"support", report.cm.row_sum(c)},
                             {"recall", report.recall[c]},
                             {"precision", report.precision.precision[c]},
                             {"precision_undefined", static_cast<bool>(report.precision.undefined[c])}});
        if (report.precision.undefined[c])
            warnings.push_back(fmt::format("class {} was never predicted; its precision is reported as 0", abbrev));
    }
    measured["per_class"] = per_class;
    j["measured"] = measured;

    ordered_json cm = ordered_json::array();
    for (std::size_t t = 0; t < report.cm.classes(); ++t) {
        ordered_json row = ordered_json::array();
        for (std::size_t p = 0; p < report.cm.classes(); ++p) row.push_back(report.cm.at(t, p));
        cm.push_back(row);
    }
    j["confusion"] = cm;

    ordered_json ref;
    ref["headline_macro_accuracy"] = R::kHeadlineMacroAccuracy;
    ref["val_precision"] = {{"n3", R::kValPrecisionN3}, {"n5", R::kValPrecisionN5},
                            {"n7", R::kValPrecisionN7}, {"n10", R::kValPrecisionN10}};
    ref["eval1"] = {{"n7", {{"macro_accuracy", R::kEval1MacroAccuracyN7}, {"macro_precision", R::kEval1MacroPrecisionN7}}},
                    {"n3", {{"macro_accuracy", R::kEval1MacroAccuracyN3}, {"macro_precision", R::kEval1MacroPrecisionN3}}}};
    ref["eval2"] = {{"n7", {{"macro_accuracy", R::kEval2MacroAccuracyN7}, {"macro_precision", R::kEval2MacroPrecisionN7}}},
                    {"n3", {{"macro_accuracy", R::kEval2MacroAccuracyN3}, {"macro_precision", R::kEval2MacroPrecisionN3}}}};
    j["paper_reference"] = ref;

    ordered_json div;
    div["macro_accuracy_minus_headline"] = report.macro_accuracy - R::kHeadlineMacroAccuracy;
    div["macro_accuracy_minus_eval1_n7"] = report.macro_accuracy - R::kEval1MacroAccuracyN7;
    div["macro_accuracy_minus_eval2_n7"] = report.macro_accuracy - R::kEval2MacroAccuracyN7;
    div["macro_precision_minus_eval1_n7"] = report.macro_precision - R::kEval1MacroPrecisionN7;
    div["macro_precision_minus_eval2_n7"] = report.macro_precision - R::kEval2MacroPrecisionN7;
    const std::optional<double> val_ref = window == 3    ? std::optional(R::kValPrecisionN3)
                                          : window == 5  ? std::optional(R::kValPrecisionN5)
                                          : window == 7  ? std::optional(R::kValPrecisionN7)
                                          : window == 10 ? std::optional(R::kValPrecisionN10)
                                                         : std::nullopt;
    if (val_ref) div["weighted_precision_minus_val_precision"] = report.weighted_precision - *val_ref;
    j["divergence"] = div;
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

std::string confusion_csv(const ConfusionMatrix& cm, bool normalized) {
    const auto name = [&](std::size_t c) {
        return c < kNumClasses && cm.classes() == kNumClasses ? std::string(label_abbrev(static_cast<ActivityLabel>(c)))
                                                              : std::to_string(c);
    };
    std::string out = "true\\predicted";
    for (std::size_t p = 0; p < cm.classes(); ++p) out += "," + name(p);
    out += '\n';
    const auto rows = cm.row_normalized();
    for (std::size_t t = 0; t < cm.classes(); ++t) {
        out += name(t);
        for (std::size_t p = 0; p < cm.classes(); ++p)
            out += normalized ? fmt::format(",{:.6f}", rows[t][p]) : fmt::format(",{}", cm.at(t, p));
        out += '\n';
    }
    return out;
}

}  // namespace gainprint::analysis
