#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gainprint/cli.hpp"
#include "gainprint/error.hpp"
#include "gainprint/model.hpp"
#include "gainprint/telemetry.hpp"
#include "json.hpp"

namespace gainprint::cli {

/// Bad or missing input files; maps to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    /// Arguments of this invocation without the program name.
    std::vector<std::string> argv;
};

/// Per-invocation record written next to the primary output.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::optional<std::uint64_t> seed;
    std::string started_at;
    std::string finished_at;
};

std::string utc_timestamp();
std::string manifest_path_for(const std::string& primary_output);
/// Writes `<primary_output>.manifest.json` via a temporary file and rename.
void write_manifest(const RunManifest& m, const std::string& primary_output);
nlohmann::json read_manifest(const std::string& path);

std::string read_text_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);
void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& content);

/// Flag value, else GAINPRINT_SEED, else `fallback`.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback);

/// `dir/stem.<suffix>` for an output path `dir/stem.ext`.
std::string sibling_path(const std::string& path, const std::string& suffix);

struct AgcOverrides {
    std::string config_path;
    std::optional<double> target_level;
    std::optional<double> g_max;
    std::optional<int> frame_seconds;

    void add_to(CLI::App& app);
    telemetry::AgcConfig resolve() const;
};

telemetry::AgcConfig parse_agc_config(const nlohmann::json& j);
nlohmann::ordered_json to_json(const telemetry::AgcConfig& c);
model::NetworkSpec parse_network_spec(const nlohmann::json& j, model::NetworkSpec base = {});
nlohmann::ordered_json to_json(const model::NetworkSpec& s);
model::TrainConfig parse_train_config(const nlohmann::json& j, model::TrainConfig base = {});
nlohmann::ordered_json to_json(const model::TrainConfig& c);

nlohmann::json load_json_file(const std::string& path);

void register_emulate(CLI::App& app, Context& ctx, int& status);
void register_capture_decode(CLI::App& app, Context& ctx, int& status);
void register_build_dataset(CLI::App& app, Context& ctx, int& status);
void register_train(CLI::App& app, Context& ctx, int& status);
void register_eval(CLI::App& app, Context& ctx, int& status);
void register_correlate(CLI::App& app, Context& ctx, int& status);
void register_synth(CLI::App& app, Context& ctx, int& status);

}  // namespace gainprint::cli
