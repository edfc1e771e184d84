#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gainprint/labels.hpp"
#include "gainprint/telemetry.hpp"

namespace gainprint::dataset {

inline constexpr std::size_t kRows = 3;
enum Row : std::size_t { kMaxRow = 0, kMeanRow = 1, kMinRow = 2 };

/// n consecutive gain triples of one source, stored row-major as a 3 x n
/// matrix with rows (max, mean, min).
struct Clip {
    std::size_t n = 0;
    std::vector<double> values;
    ActivityLabel label = ActivityLabel::ClassicalMusic;
    std::string source_id;
    std::uint64_t start_minute = 0;

    double at(std::size_t row, std::size_t col) const { return values[row * n + col]; }
    double& at(std::size_t row, std::size_t col) { return values[row * n + col]; }

    bool operator==(const Clip&) const = default;
};

/// All records of one capture session, sorted by minute.
struct LabeledStream {
    std::string source_id;
    ActivityLabel label = ActivityLabel::ClassicalMusic;
    std::optional<int> distance_cm;
    std::vector<telemetry::TelemetryRecord> records;
};

/// Sliding window of length n, stride 1. Records must be one labeled source
/// with contiguous minute indices; a gap raises DomainError naming it.
std::vector<Clip> window_clips(std::span<const telemetry::TelemetryRecord> records, std::size_t n);

/// Groups decoded records by session id, sorted by minute. Every record must
/// carry a label and a session must not mix labels.
std::vector<LabeledStream> group_streams(std::span<const telemetry::TelemetryRecord> records);

enum class SplitUnit { Clip, Source };

struct SplitSpec {
    double dev_fraction_train = 0.8;
    /// Clip: shuffle all development clips, floor(f*N) go to train.
    /// Source: per class, shuffle development sources, floor(f*k) (at least one)
    /// go to train with all their clips.
    SplitUnit unit = SplitUnit::Clip;
    /// Empty means every source not named in an evaluation set.
    std::vector<std::string> development;
    std::vector<std::pair<std::string, std::vector<std::string>>> evaluation;

    /// Throws ConfigError on overlapping lists or a bad fraction.
    void validate() const;
};

SplitSpec parse_split_spec(const std::string& json_text);
std::string split_spec_to_json(const SplitSpec& spec);

struct DatasetSplits {
    std::size_t n = 0;
    std::vector<Clip> train;
    std::vector<Clip> val;
    std::vector<std::pair<std::string, std::vector<Clip>>> evaluation;
};

DatasetSplits build_splits(std::span<const LabeledStream> sources, const SplitSpec& spec, std::size_t n,
                           std::uint64_t seed);

struct ClassDistribution {
    std::array<std::size_t, kNumClasses> counts{};
    std::size_t total = 0;
};

ClassDistribution class_distribution(std::span<const Clip> clips);

/// Per-class counts laid out as Class | Train | Val | <eval sets...>.
std::string format_distribution_table(const DatasetSplits& splits);

/// Source ids per split as JSON: {"train": [...], "val": [...], "<eval>": [...]}.
std::string split_manifest_json(const DatasetSplits& splits);

/// Header: source_id,label,start_minute,n,max_0..max_{n-1},mean_0..,min_0..
void write_clips_csv(std::ostream& out, std::span<const Clip> clips, std::size_t n);
/// Throws FormatError with the line number on malformed rows.
std::vector<Clip> read_clips_csv(std::istream& in);

}  // namespace gainprint::dataset
