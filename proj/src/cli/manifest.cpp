#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "common.hpp"

namespace gainprint::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_path_for(const std::string& primary_output) { return primary_output + ".manifest.json"; }

void write_manifest(const RunManifest& m, const std::string& primary_output) {
    ordered_json j;
    j["tool"] = "gainprint";
    j["version"] = GAINPRINT_VERSION;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["config"] = m.config;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    write_file_atomic(manifest_path_for(primary_output), j.dump(2) + "\n");
}

json read_manifest(const std::string& path) { return load_json_file(path); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

namespace {

template <typename Bytes>
void write_atomic_impl(const std::string& path, const Bytes& content) {
    const fs::path target(path);
    if (target.has_parent_path() && !fs::exists(target.parent_path()))
        throw InputError("output directory does not exist: " + target.parent_path().string());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(content.data()), static_cast<std::streamsize>(content.size()));
        if (!out) throw InputError("short write to " + tmp);
    }
    fs::rename(tmp, target);
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) { write_atomic_impl(path, content); }

void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& content) {
    write_atomic_impl(path, content);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    if (flag) return *flag;
    if (const char* env = std::getenv("GAINPRINT_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string_view(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw InputError(std::string("GAINPRINT_SEED is not an unsigned integer: ") + env);
    }
    return fallback;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    const fs::path p(path);
    return (p.parent_path() / (p.stem().string() + "." + suffix)).string();
}

json load_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
    if (!j.is_object()) throw InputError(std::string(what) + " config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw InputError(std::string(what) + " config: unknown key '" + key + "'");
}

template <typename T>
void read_key(const json& j, const char* key, T& out, const char* what) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string(what) + " config: bad value for '" + key + "'");
    }
}

}  // namespace

telemetry::AgcConfig parse_agc_config(const json& j) {
    reject_unknown_keys(j, {"target_level_dbfs", "g_max_db", "frame_seconds"}, "agc");
    telemetry::AgcConfig c;
    read_key(j, "target_level_dbfs", c.target_level_dbfs, "agc");
    read_key(j, "g_max_db", c.g_max_db, "agc");
    read_key(j, "frame_seconds", c.frame_seconds, "agc");
    return c;
}

ordered_json to_json(const telemetry::AgcConfig& c) {
    return {{"target_level_dbfs", c.target_level_dbfs}, {"g_max_db", c.g_max_db}, {"frame_seconds", c.frame_seconds}};
}

model::NetworkSpec parse_network_spec(const json& j, model::NetworkSpec s) {
    reject_unknown_keys(j, {"n", "c1", "k1", "c2", "k2", "d1", "d2", "classes"}, "network");
    read_key(j, "n", s.n, "network");
    read_key(j, "c1", s.c1, "network");
    read_key(j, "k1", s.k1, "network");
    read_key(j, "c2", s.c2, "network");
    read_key(j, "k2", s.k2, "network");
    read_key(j, "d1", s.d1, "network");
    read_key(j, "d2", s.d2, "network");
    read_key(j, "classes", s.classes, "network");
    return s;
}

ordered_json to_json(const model::NetworkSpec& s) {
    return {{"n", s.n},   {"c1", s.c1}, {"k1", s.k1}, {"c2", s.c2},
            {"k2", s.k2}, {"d1", s.d1}, {"d2", s.d2}, {"classes", s.classes}};
}

model::TrainConfig parse_train_config(const json& j, model::TrainConfig c) {
    reject_unknown_keys(j, {"learning_rate", "batch_size", "max_epochs", "patience", "seed"}, "train");
    read_key(j, "learning_rate", c.learning_rate, "train");
    read_key(j, "batch_size", c.batch_size, "train");
    read_key(j, "max_epochs", c.max_epochs, "train");
    read_key(j, "patience", c.patience, "train");
    read_key(j, "seed", c.seed, "train");
    return c;
}

ordered_json to_json(const model::TrainConfig& c) {
    return {{"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"max_epochs", c.max_epochs},
            {"patience", c.patience},
            {"seed", c.seed}};
}

void AgcOverrides::add_to(CLI::App& app) {
    app.add_option("--agc-config", config_path, "AGC config JSON (target_level_dbfs, g_max_db, frame_seconds)");
    app.add_option("--target-level", target_level, "Override AGC target level in dBFS (default -20)");
    app.add_option("--g-max", g_max, "Override maximum AGC gain in dB (default 30)");
    app.add_option("--frame-seconds", frame_seconds, "Override AGC frame length in seconds; must divide 60");
}

telemetry::AgcConfig AgcOverrides::resolve() const {
    telemetry::AgcConfig c;
    if (!config_path.empty()) c = parse_agc_config(load_json_file(config_path));
    if (target_level) c.target_level_dbfs = *target_level;
    if (g_max) c.g_max_db = *g_max;
    if (frame_seconds) c.frame_seconds = *frame_seconds;
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    }
    return c;
}

}  // namespace gainprint::cli
