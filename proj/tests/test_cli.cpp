#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gainprint/audio.hpp"
#include "gainprint/cli.hpp"
#include "gainprint/telemetry.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace gainprint;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("gainprint_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("--help exits 0 for the tool and every command") {
    CHECK(run({"--help"}).code == 0);
    for (const char* cmd :
         {"emulate", "capture-decode", "build-dataset", "train", "eval", "correlate", "synth", "replay"}) {
        INFO(cmd);
        const auto r = run({cmd, "--help"});
        CHECK(r.code == 0);
        CHECK_FALSE(r.out.empty());
    }
}

TEST_CASE("usage errors exit 64") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"bogus"}).code == cli::kExitUsage);
    CHECK(run({"emulate", "--nope"}).code == cli::kExitUsage);
    CHECK(run({"emulate", "--out", "x.jsonl"}).code == cli::kExitUsage);
}

TEST_CASE("missing input files exit 2") {
    const auto dir = fresh_dir("missing");
    const auto r = run({"emulate", "--in", (dir / "absent.wav").string(), "--out", (dir / "o.jsonl").string()});
    CHECK(r.code == cli::kExitInputError);
    CHECK(r.err.find("absent.wav") != std::string::npos);
    CHECK(run({"eval", "--model", (dir / "m.bin").string(), "--dataset", (dir / "d.csv").string(), "--out",
               (dir / "m.json").string()})
              .code == cli::kExitInputError);
}

TEST_CASE("emulate writes one packet per minute on a 60 s cadence with a manifest") {
    const auto dir = fresh_dir("emulate");
    const auto wav = dir / "kitchen.wav";
    audio::write_wav_file(wav.string(), test_util::sine(300.0, 0.05, 16000, 16000 * 190), 16000);
    const auto out = dir / "kitchen.jsonl";
    const auto r = run({"emulate", "--in", wav.string(), "--label", "ck", "--start-ms", "5000", "--out",
                        out.string()});
    REQUIRE(r.code == 0);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 3);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto p = telemetry::parse_packet(lines[i]);
        CHECK(p.timestamp_ms == 5000 + 60000 * i);
        CHECK(p.session_id == "kitchen");
        const auto rec = telemetry::decode_packet(lines[i]);
        CHECK(rec.minute_index == i);
        CHECK(rec.label == ActivityLabel::CookingEating);
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / "kitchen.jsonl.manifest.json"));
    CHECK(manifest.at("command") == "emulate");
    CHECK(manifest.at("outputs").at(0) == out.string());
}

TEST_CASE("software mute produces an empty stream and exits 0") {
    const auto dir = fresh_dir("mute");
    const auto wav = dir / "a.wav";
    audio::write_wav_file(wav.string(), test_util::sine(300.0, 0.05, 16000, 16000 * 120), 16000);
    const auto out = dir / "a.jsonl";
    CHECK(run({"emulate", "--in", wav.string(), "--policy", "software-mute", "--out", out.string()}).code == 0);
    CHECK(fs::exists(out));
    CHECK(fs::file_size(out) == 0);
}

TEST_CASE("capture-decode reports bad lines and exits 3") {
    const auto dir = fresh_dir("decode");
    const auto recs = test_util::records(3, "s1", ActivityLabel::Keyboard);
    std::ostringstream s;
    telemetry::write_stream(s, recs);
    const auto in = dir / "cap.jsonl";
    std::ofstream(in) << s.str() << "{broken\n";
    const auto out = dir / "cap.csv";
    const auto r = run({"capture-decode", "--in", in.string(), "--out", out.string()});
    CHECK(r.code == cli::kExitPartialDecode);
    CHECK(r.err.find("cap.jsonl:4:") != std::string::npos);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "session_id,label,minute_index,min_gain,mean_gain,max_gain,status_only,silent");
    CHECK(lines[1].rfind("s1,kb,0,", 0) == 0);
}

TEST_CASE("bad AGC overrides are input errors") {
    const auto dir = fresh_dir("agc");
    const auto wav = dir / "a.wav";
    audio::write_wav_file(wav.string(), test_util::sine(300.0, 0.05, 16000, 16000 * 60), 16000);
    CHECK(run({"emulate", "--in", wav.string(), "--frame-seconds", "7", "--out", (dir / "o.jsonl").string()})
              .code == cli::kExitInputError);
}

TEST_CASE("small pipeline from synth to eval") {
    const auto dir = fresh_dir("pipeline");
    REQUIRE(run({"synth", "--out-dir", (dir / "wav").string(), "--sources-per-class", "2", "--minutes", "12",
                 "--seed", "3"})
                .code == 0);
    fs::create_directories(dir / "streams");
    for (const auto& entry : fs::directory_iterator(dir / "wav")) {
        if (entry.path().extension() != ".wav") continue;
        const auto stem = entry.path().stem().string();
        const auto label = stem.substr(0, 2);
        REQUIRE(run({"emulate", "--in", entry.path().string(), "--label", label, "--out",
                     (dir / "streams" / (stem + ".jsonl")).string()})
                    .code == 0);
    }
    std::ofstream(dir / "split.json") << R"({"unit":"source","evaluation":{"eval1":["cm_01","ck_01","tk_01","dg_01","kb_01","vc_01"]}})";
    const auto ds = (dir / "clips.csv").string();
    const auto b = run({"build-dataset", "--streams", (dir / "streams").string(), "--split",
                        (dir / "split.json").string(), "--window", "5", "--dev-fraction", "1.0", "--unit", "clip",
                        "--out", ds});
    REQUIRE(b.code == 0);
    CHECK(fs::exists(dir / "clips.train.csv"));
    CHECK(fs::exists(dir / "clips.eval1.csv"));
    const auto t = run({"train", "--dataset", ds, "--epochs", "3", "--batch-size", "50", "--quiet",
                        "--out", (dir / "model.bin").string(), "--log", (dir / "log.csv").string()});
    // With every development clip in train the validation set is empty.
    CHECK(t.code == cli::kExitInputError);
    const auto b2 = run({"build-dataset", "--streams", (dir / "streams").string(), "--split",
                         (dir / "split.json").string(), "--window", "5", "--unit", "clip", "--out", ds});
    REQUIRE(b2.code == 0);
    const auto t2 = run({"train", "--dataset", ds, "--epochs", "3", "--batch-size", "50", "--quiet", "--out",
                         (dir / "model.bin").string(), "--log", (dir / "log.csv").string()});
    INFO(t2.err);
    REQUIRE(t2.code == 0);
    CHECK(t2.out.find("best epoch") != std::string::npos);
    const auto e = run({"eval", "--model", (dir / "model.bin").string(), "--dataset",
                        (dir / "clips.eval1.csv").string(), "--name", "eval1", "--out", (dir / "metrics.json").string(),
                        "--confusion", (dir / "cm.csv").string()});
    REQUIRE(e.code == 0);
    const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
    CHECK(metrics.contains("paper_reference"));
    CHECK(metrics.at("examples").get<int>() == 6 * 8);
    const auto manifest = nlohmann::json::parse(slurp(dir / "model.bin.manifest.json"));
    const auto argv = manifest.at("argv").get<std::vector<std::string>>();
    CHECK(argv.back() == "42");
    const auto replay = run({"replay", "--manifest", (dir / "model.bin.manifest.json").string()});
    CHECK(replay.code == 0);
}

TEST_CASE("correlate writes coefficients for a WAV file") {
    const auto dir = fresh_dir("correlate");
    REQUIRE(run({"synth", "--kind", "am-noise", "--out-dir", dir.string(), "--minutes", "6", "--seed", "1"}).code ==
            0);
    const auto r = run({"correlate", "--wav", (dir / "am_noise.wav").string(), "--out", (dir / "c.json").string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "c.json"));
    CHECK(j.at("r_mean").get<double>() < -0.9);
}
