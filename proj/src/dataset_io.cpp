#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "gainprint/dataset.hpp"
#include "gainprint/error.hpp"
#include "json.hpp"

namespace gainprint::dataset {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string header_for(std::size_t n) {
    std::string h = "source_id,label,start_minute,n";
    for (const char* row : {"max", "mean", "min"})
        for (std::size_t j = 0; j < n; ++j) h += fmt::format(",{}_{}", row, j);
    return h;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

void write_clips_csv(std::ostream& out, std::span<const Clip> clips, std::size_t n) {
    out << header_for(n) << '\n';
    for (const auto& c : clips) {
        if (c.n != n) throw DomainError(fmt::format("write_clips_csv: clip with n={} in a file with n={}", c.n, n));
        if (c.source_id.find_first_of(",\n\r") != std::string::npos)
            throw DomainError("write_clips_csv: source id '" + c.source_id + "' contains a separator");
        out << fmt::format("{},{},{},{}", c.source_id, label_abbrev(c.label), c.start_minute, c.n);
        for (double v : c.values) out << fmt::format(",{}", v);
        out << '\n';
    }
}

std::vector<Clip> read_clips_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("dataset csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_fields(line);
    if (header.size() < 4 || header[0] != "source_id" || header[1] != "label" || header[2] != "start_minute" ||
        header[3] != "n" || (header.size() - 4) % kRows != 0)
        throw FormatError("dataset csv: unexpected header");
    const std::size_t n = (header.size() - 4) / kRows;
    if (n == 0 || line != header_for(n)) throw FormatError("dataset csv: unexpected header");

    std::vector<Clip> clips;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        const auto bad = [&](const std::string& why) {
            return FormatError(fmt::format("dataset csv line {}: {}", number, why));
        };
        if (fields.size() != header.size()) throw bad(fmt::format("expected {} fields, got {}", header.size(), fields.size()));
        Clip c;
        c.source_id = std::string(fields[0]);
        const auto label = parse_label(fields[1]);
        if (!label) throw bad("unknown label '" + std::string(fields[1]) + "'");
        c.label = *label;
        if (!parse_number(fields[2], c.start_minute)) throw bad("bad start_minute");
        if (!parse_number(fields[3], c.n) || c.n != n) throw bad("n does not match header");
        c.values.resize(kRows * n);
        for (std::size_t k = 0; k < kRows * n; ++k) {
            if (!parse_number(fields[4 + k], c.values[k]) || !std::isfinite(c.values[k]))
                throw bad("bad value in column " + std::string(header[4 + k]));
        }
        clips.push_back(std::move(c));
    }
    return clips;
}

std::string format_distribution_table(const DatasetSplits& splits) {
    std::vector<std::pair<std::string, ClassDistribution>> cols;
    cols.emplace_back("Train", class_distribution(splits.train));
    cols.emplace_back("Val", class_distribution(splits.val));
    for (const auto& [name, clips] : splits.evaluation) {
        std::string title = name;
        if (!title.empty()) title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(title[0])));
        cols.emplace_back(title, class_distribution(clips));
    }
    std::string out = fmt::format("{:<18}", "Class");
    for (const auto& [title, _] : cols) out += fmt::format(" {:>8}", title);
    out += '\n';
    for (ActivityLabel l : kAllLabels) {
        out += fmt::format("{:<18}", label_name(l));
        for (const auto& [_, d] : cols) out += fmt::format(" {:>8}", d.counts[static_cast<std::size_t>(l)]);
        out += '\n';
    }
    out += fmt::format("{:<18}", "total (clips)");
    for (const auto& [_, d] : cols) out += fmt::format(" {:>8}", d.total);
    out += '\n';
    return out;
}

std::string split_manifest_json(const DatasetSplits& splits) {
    const auto ids = [](std::span<const Clip> clips) {
        std::set<std::string> s;
        for (const auto& c : clips) s.insert(c.source_id);
        return std::vector<std::string>(s.begin(), s.end());
    };
    nlohmann::ordered_json j;
    j["n"] = splits.n;
    j["train"] = ids(splits.train);
    j["val"] = ids(splits.val);
    for (const auto& [name, clips] : splits.evaluation) j[name] = ids(clips);
    return j.dump(2);
}

}  // namespace gainprint::dataset
