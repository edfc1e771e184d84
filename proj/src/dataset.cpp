#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gainprint/dataset.hpp"
#include "gainprint/error.hpp"
#include "gainprint/rng.hpp"
#include "json.hpp"

namespace gainprint::dataset {

using telemetry::TelemetryRecord;

std::vector<Clip> window_clips(std::span<const TelemetryRecord> records, std::size_t n) {
    if (n == 0) throw DomainError("window_clips: window length must be at least 1");
    if (records.empty()) return {};
    const auto& first = records.front();
    if (!first.label) throw DomainError("window_clips: source '" + first.session_id + "' has no label");
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& prev = records[i - 1];
        const auto& cur = records[i];
        if (cur.session_id != first.session_id)
            throw DomainError("window_clips: records mix sources '" + first.session_id + "' and '" +
                              cur.session_id + "'");
        if (cur.label != first.label)
            throw DomainError("window_clips: source '" + first.session_id + "' mixes labels");
        if (cur.minute_index != prev.minute_index + 1)
            throw DomainError("window_clips: gap in source '" + first.session_id + "' between minute " +
                              std::to_string(prev.minute_index) + " and minute " +
                              std::to_string(cur.minute_index));
    }
    if (records.size() < n) return {};

    std::vector<Clip> clips;
    clips.reserve(records.size() - n + 1);
    for (std::size_t start = 0; start + n <= records.size(); ++start) {
        Clip c;
        c.n = n;
        c.values.resize(kRows * n);
        c.label = *first.label;
        c.source_id = first.session_id;
        c.start_minute = records[start].minute_index;
        for (std::size_t j = 0; j < n; ++j) {
            const auto& r = records[start + j];
            c.at(kMaxRow, j) = r.max_gain;
            c.at(kMeanRow, j) = r.mean_gain;
            c.at(kMinRow, j) = r.min_gain;
        }
        clips.push_back(std::move(c));
    }
    return clips;
}

std::vector<LabeledStream> group_streams(std::span<const TelemetryRecord> records) {
    std::map<std::string, LabeledStream> by_id;
    for (const auto& r : records) {
        if (!r.label) throw DomainError("group_streams: record of session '" + r.session_id + "' has no label");
        auto [it, inserted] = by_id.try_emplace(r.session_id);
        auto& s = it->second;
        if (inserted) {
            s.source_id = r.session_id;
            s.label = *r.label;
        } else if (s.label != *r.label) {
            throw DomainError("group_streams: session '" + r.session_id + "' mixes labels");
        }
        s.records.push_back(r);
    }
    std::vector<LabeledStream> out;
    out.reserve(by_id.size());
    for (auto& [_, s] : by_id) {
        std::stable_sort(s.records.begin(), s.records.end(),
                         [](const auto& a, const auto& b) { return a.minute_index < b.minute_index; });
        for (std::size_t i = 1; i < s.records.size(); ++i) {
            if (s.records[i].minute_index == s.records[i - 1].minute_index)
                throw DomainError("group_streams: duplicate minute " + std::to_string(s.records[i].minute_index) +
                                  " in session '" + s.source_id + "'");
        }
        out.push_back(std::move(s));
    }
    return out;
}

void SplitSpec::validate() const {
    if (!(dev_fraction_train > 0.0 && dev_fraction_train <= 1.0))
        throw ConfigError("split: dev_fraction_train must be in (0, 1]");
    std::map<std::string, std::string> owner;
    const auto claim = [&](const std::string& id, const std::string& set) {
        auto [it, inserted] = owner.emplace(id, set);
        if (!inserted)
            throw ConfigError("split: source '" + id + "' appears in both '" + it->second + "' and '" + set + "'");
    };
    for (const auto& id : development) claim(id, "development");
    std::set<std::string> names;
    for (const auto& [name, ids] : evaluation) {
        if (name == "train" || name == "val" || name == "development")
            throw ConfigError("split: evaluation set may not be named '" + name + "'");
        if (!names.insert(name).second) throw ConfigError("split: duplicate evaluation set '" + name + "'");
        for (const auto& id : ids) claim(id, name);
    }
}

SplitSpec parse_split_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("split: invalid JSON: ") + e.what());
    }
    SplitSpec spec;
    try {
        if (j.contains("dev_fraction_train")) spec.dev_fraction_train = j.at("dev_fraction_train").get<double>();
        if (j.contains("unit")) {
            const auto unit = j.at("unit").get<std::string>();
            if (unit == "clip") spec.unit = SplitUnit::Clip;
            else if (unit == "source") spec.unit = SplitUnit::Source;
            else throw ConfigError("split: unit must be 'clip' or 'source'");
        }
        if (j.contains("development")) spec.development = j.at("development").get<std::vector<std::string>>();
        if (j.contains("evaluation")) {
            // Keys iterate in sorted order, so evaluation sets come out sorted by name.
            for (const auto& [name, ids] : j.at("evaluation").items())
                spec.evaluation.emplace_back(name, ids.get<std::vector<std::string>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("split: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string split_spec_to_json(const SplitSpec& spec) {
    nlohmann::ordered_json j;
    j["dev_fraction_train"] = spec.dev_fraction_train;
    j["unit"] = spec.unit == SplitUnit::Clip ? "clip" : "source";
    j["development"] = spec.development;
    nlohmann::ordered_json eval = nlohmann::ordered_json::object();
    for (const auto& [name, ids] : spec.evaluation) eval[name] = ids;
    j["evaluation"] = eval;
    return j.dump(2);
}

DatasetSplits build_splits(std::span<const LabeledStream> sources, const SplitSpec& spec, std::size_t n,
                           std::uint64_t seed) {
    spec.validate();
    std::map<std::string, const LabeledStream*> by_id;
    for (const auto& s : sources) {
        if (!by_id.emplace(s.source_id, &s).second)
            throw ConfigError("split: duplicate source id '" + s.source_id + "'");
    }
    const auto lookup = [&](const std::string& id) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw ConfigError("split: unknown source id '" + id + "'");
        return it->second;
    };

    std::set<std::string> in_eval;
    for (const auto& [_, ids] : spec.evaluation) in_eval.insert(ids.begin(), ids.end());

    std::vector<const LabeledStream*> dev;
    if (spec.development.empty()) {
        for (const auto& [id, s] : by_id)
            if (!in_eval.contains(id)) dev.push_back(s);
    } else {
        for (const auto& id : spec.development) dev.push_back(lookup(id));
    }

    DatasetSplits out;
    out.n = n;
    Rng rng(seed);
    const auto clips_of = [&](const LabeledStream& s) {
        auto clips = window_clips(s.records, n);
        for (auto& c : clips) c.label = s.label;
        return clips;
    };

    if (spec.unit == SplitUnit::Clip) {
        std::vector<Clip> all;
        for (const auto* s : dev) {
            auto clips = clips_of(*s);
            std::move(clips.begin(), clips.end(), std::back_inserter(all));
        }
        rng.shuffle(std::span(all));
        const auto n_train = static_cast<std::size_t>(std::floor(spec.dev_fraction_train * static_cast<double>(all.size())));
        out.train.assign(std::make_move_iterator(all.begin()), std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)));
        out.val.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)), std::make_move_iterator(all.end()));
    } else {
        for (ActivityLabel label : kAllLabels) {
            std::vector<const LabeledStream*> group;
            for (const auto* s : dev)
                if (s->label == label) group.push_back(s);
            if (group.empty()) continue;
            rng.shuffle(std::span(group));
            auto n_train = static_cast<std::size_t>(std::floor(spec.dev_fraction_train * static_cast<double>(group.size())));
            n_train = std::max<std::size_t>(n_train, 1);
            for (std::size_t i = 0; i < group.size(); ++i) {
                auto clips = clips_of(*group[i]);
                auto& dst = i < n_train ? out.train : out.val;
                std::move(clips.begin(), clips.end(), std::back_inserter(dst));
            }
        }
    }

    for (const auto& [name, ids] : spec.evaluation) {
        std::vector<Clip> clips;
        for (const auto& id : ids) {
            auto c = clips_of(*lookup(id));
            std::move(c.begin(), c.end(), std::back_inserter(clips));
        }
        out.evaluation.emplace_back(name, std::move(clips));
    }
    return out;
}

ClassDistribution class_distribution(std::span<const Clip> clips) {
    ClassDistribution d;
    for (const auto& c : clips) ++d.counts[static_cast<std::size_t>(c.label)];
    d.total = clips.size();
    return d;
}

}  // namespace gainprint::dataset
