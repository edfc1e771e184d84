// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gainprint/analysis.hpp"
#include "gainprint/audio.hpp"
#include "gainprint/cli.hpp"
#include "gainprint/dataset.hpp"
#include "gainprint/model.hpp"
#include "gainprint/synth.hpp"
#include "gainprint/telemetry.hpp"
#include "grad_oracle.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace gainprint;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double cpu_budget_s;  // 0 means no runtime bound
    std::function<Outcome()> body;
};

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "gainprint_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// 1. Analytic gradients against central differences.
Outcome gradient_oracle() {
    double worst = 0.0, worst_forward = 0.0;
    std::size_t checked = 0, skipped = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto r = grad_oracle::check_network(seed * 7919, 1e-4);
        worst = std::max(worst, r.max_rel_error);
        worst_forward = std::max(worst_forward, r.max_forward_diff);
        checked += r.checked;
        skipped += r.skipped_kinks;
    }
    const bool pass = worst <= 1e-4 && worst_forward < 1e-12 && skipped * 10 < checked + skipped;
    return {pass, fmt::format("20 nets, {} params checked, {} skipped at ReLU kinks, max rel err {:.2e}", checked,
                              skipped, worst)};
}

// 2. Packet codec round trip and typed failures.
Outcome codec_round_trip() {
    Rng rng(20240917);
    std::size_t ok = 0;
    for (int i = 0; i < 1000; ++i) {
        telemetry::TelemetryRecord r;
        r.minute_index = rng.below(1ULL << 32);
        const double a = rng.uniform(0.0, 30.0), b = rng.uniform(0.0, 30.0);
        r.min_gain = std::min(a, b);
        r.max_gain = std::max(a, b);
        r.mean_gain = rng.uniform(r.min_gain, r.max_gain);
        r.session_id = fmt::format("session-{}", rng.below(100000));
        if (rng.below(4) != 0) r.label = label_from_code(static_cast<int>(rng.below(kNumClasses)));
        if (rng.below(10) == 0) {
            r.min_gain = r.mean_gain = r.max_gain = 0.0;
            r.status_only = true;
            r.silent = rng.below(2) == 0;
        }
        const auto line = telemetry::serialize(telemetry::encode_packet(r, rng.below(1ULL << 41)));
        if (telemetry::decode_packet(line) == r) ++ok;
    }
    std::size_t typed = 0;
    for (int i = 0; i < 100; ++i) {
        telemetry::TelemetryRecord r;
        r.minute_index = static_cast<std::uint64_t>(i);
        r.min_gain = 1.0;
        r.mean_gain = 2.0;
        r.max_gain = 3.0;
        r.session_id = "m";
        std::string line = telemetry::serialize(telemetry::encode_packet(r, 0));
        line.pop_back();
        const auto payload_at = line.find("\"payload\":\"") + 11;
        const auto payload_len = line.size() - 2 - payload_at;
        switch (i % 5) {
            case 0: line.resize(rng.below(line.size())); break;
            case 1: line.insert(rng.below(line.size()), "\"}{,"); break;
            case 2: line[payload_at + rng.below(payload_len)] = "!#$%&*"[rng.below(6)]; break;
            case 3: line.erase(payload_at + rng.below(payload_len), 1); break;
            default: line[rng.below(2) == 0 ? 0 : line.size() - 1] = ']'; break;
        }
        try {
            (void)telemetry::decode_packet(line);
        } catch (const telemetry::PacketError&) {
            ++typed;
        } catch (...) {
        }
    }
    return {ok == 1000 && typed == 100, fmt::format("{}/1000 round trips, {}/100 mutations typed", ok, typed)};
}

// 3. Gain ordering over an emulated corpus and the attenuation shift.
Outcome gain_invariants() {
    std::vector<audio::AudioClipSource> corpus;
    for (auto l : kAllLabels) corpus.push_back(synth::synthesize_activity(l, 5, 16000, 31 + label_code(l)));
    corpus.push_back(synth::amplitude_modulated_noise(10, 16000, 5));
    std::size_t records = 0, ordered = 0, unclamped = 0, shifted = 0;
    double worst_shift_err = 0.0;
    const telemetry::AgcConfig cfg;
    for (const auto& src : corpus) {
        auto quiet = src;
        for (auto& s : quiet.samples) s *= 0.5f;
        const auto a = telemetry::emulate_stream(src, telemetry::MutePolicy::ContinuousSampling, cfg);
        const auto b = telemetry::emulate_stream(quiet, telemetry::MutePolicy::ContinuousSampling, cfg);
        for (const auto* set : {&a, &b})
            for (const auto& r : *set) {
                ++records;
                if (r.min_gain <= r.mean_gain && r.mean_gain <= r.max_gain) ++ordered;
            }
        // A minute is unclamped when no frame hits either clamp in either run.
        const auto la = audio::frame_levels(src.samples, src.sample_rate, cfg.frame_seconds);
        for (std::size_t m = 0; m < a.size(); ++m) {
            bool free = true;
            for (std::size_t f = 0; f < 60; ++f) {
                const double g = cfg.target_level_dbfs - la[m * 60 + f];
                free = free && g > 0.0 && g + 6.03 < cfg.g_max_db;
            }
            if (!free) continue;
            ++unclamped;
            const double err = std::max({std::abs(b[m].min_gain - a[m].min_gain - 6.0206),
                                         std::abs(b[m].mean_gain - a[m].mean_gain - 6.0206),
                                         std::abs(b[m].max_gain - a[m].max_gain - 6.0206)});
            worst_shift_err = std::max(worst_shift_err, err);
            if (err <= 0.01) ++shifted;
        }
    }
    const bool pass = ordered == records && unclamped > 0 && shifted == unclamped;
    return {pass, fmt::format("{}/{} records ordered, {}/{} unclamped minutes shifted by 6.02 dB (max err {:.1e})",
                              ordered, records, shifted, unclamped, worst_shift_err)};
}

// 4. Window count law and column reconstruction.
Outcome window_law() {
    std::size_t cases = 0, good = 0;
    for (std::size_t n : {3u, 5u, 7u, 10u})
        for (std::size_t t = 0; t <= 100; ++t) {
            ++cases;
            const auto recs = test_util::records(t, "w", ActivityLabel::Keyboard, t * 31 + n);
            const auto clips = dataset::window_clips(recs, n);
            if (clips.size() == (t + 1 > n ? t + 1 - n : 0)) ++good;
        }
    Rng rng(77);
    std::size_t rebuilt = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = std::array<std::size_t, 4>{3, 5, 7, 10}[rng.below(4)];
        const std::size_t t = n + rng.below(90);
        const auto recs = test_util::records(t, "w", ActivityLabel::DogBarking, rng.next());
        const auto clips = dataset::window_clips(recs, n);
        bool match = true;
        for (std::size_t i = 0; i < clips.size(); ++i)
            for (std::size_t j = 0; j < n; ++j)
                match = match && clips[i].at(dataset::kMaxRow, j) == recs[i + j].max_gain &&
                        clips[i].at(dataset::kMeanRow, j) == recs[i + j].mean_gain &&
                        clips[i].at(dataset::kMinRow, j) == recs[i + j].min_gain;
        if (match) ++rebuilt;
    }
    return {good == cases && rebuilt == 50,
            fmt::format("{}/{} (t, n) counts, {}/50 brute-force reconstructions", good, cases, rebuilt)};
}

// 5. Level/gain correlation on amplitude-modulated noise through WAV, AGC and packets.
Outcome correlation() {
    const auto generated = synth::amplitude_modulated_noise(30, 16000, 2024);
    const auto src = audio::decode_wav(audio::encode_wav(generated.samples, generated.sample_rate));
    const telemetry::AgcConfig cfg;
    const auto recs = telemetry::emulate_stream(src, telemetry::MutePolicy::ContinuousSampling, cfg);
    std::ostringstream wire;
    telemetry::write_stream(wire, recs);
    std::istringstream in(wire.str());
    const auto decoded = telemetry::read_stream(in);
    const auto power = audio::power_series(src, 60, cfg.frame_seconds);
    const auto r = analysis::gain_power_correlation(power, decoded.records);
    return {decoded.errors.empty() && std::abs(r.r_mean) >= 0.95,
            fmt::format("{} minutes, r_mean {:.4f}, r_min {:.4f}, r_mean(dBA) {:.4f}", r.points, r.r_mean, r.r_min,
                        r.r_mean_dba.value_or(std::nan("")))};
}

// Shared by criteria 6 to 8.
struct Corpus {
    dataset::DatasetSplits splits;
    std::size_t minutes_per_class = 0;
};

Corpus& synthetic_corpus() {
    static Corpus c = [] {
        constexpr std::size_t kSourcesPerClass = 6;
        constexpr std::size_t kMinutes = 30;
        constexpr int kRate = 16000;
        Rng rng(6);
        const telemetry::AgcConfig cfg;
        std::vector<dataset::LabeledStream> streams;
        dataset::SplitSpec spec;
        spec.unit = dataset::SplitUnit::Source;
        std::vector<std::string> eval1, eval2;
        for (auto label : kAllLabels)
            for (std::size_t i = 0; i < kSourcesPerClass; ++i) {
                const auto id = fmt::format("{}_{:02}", label_abbrev(label), i);
                const auto seed = rng.next();
                const double offset = rng.uniform(-3.0, 3.0);
                auto src = synth::synthesize_activity(label, kMinutes, kRate, seed, offset);
                src.source_id = id;
                src.label = label;
                const auto recs = telemetry::emulate_stream(src, telemetry::MutePolicy::ContinuousSampling, cfg);
                std::ostringstream wire;
                telemetry::write_stream(wire, recs);
                std::istringstream in(wire.str());
                auto decoded = telemetry::read_stream(in);
                const auto grouped = dataset::group_streams(decoded.records);
                streams.insert(streams.end(), grouped.begin(), grouped.end());
                if (i == kSourcesPerClass - 2) eval1.push_back(id);
                if (i == kSourcesPerClass - 1) eval2.push_back(id);
            }
        spec.evaluation = {{"eval1", eval1}, {"eval2", eval2}};
        Corpus out;
        out.splits = dataset::build_splits(streams, spec, 7, 42);
        out.minutes_per_class = kSourcesPerClass * kMinutes;
        return out;
    }();
    return c;
}

std::vector<ActivityLabel> labels_of(const std::vector<dataset::Clip>& clips) {
    std::vector<ActivityLabel> out;
    for (const auto& c : clips) out.push_back(c.label);
    return out;
}

// 6. Synthetic six-class corpus, trained and scored on held-out sources.
Outcome synthetic_end_to_end() {
    const auto& corpus = synthetic_corpus();
    const auto& s = corpus.splits;
    model::TrainConfig cfg;
    cfg.batch_size = 50;
    const auto result = model::train(s.train, s.val, model::NetworkSpec{}, cfg);
    std::vector<dataset::Clip> held_out;
    std::string per_set;
    for (const auto& [name, clips] : s.evaluation) {
        held_out.insert(held_out.end(), clips.begin(), clips.end());
        const auto rep = analysis::evaluate(labels_of(clips), model::predict(result.model, clips));
        per_set += fmt::format(", {} {:.4f}", name, rep.macro_accuracy);
    }
    const auto rep = analysis::evaluate(labels_of(held_out), model::predict(result.model, held_out));
    return {rep.macro_accuracy >= 0.80 && corpus.minutes_per_class >= 60,
            fmt::format("{} min/class, {} train / {} val / {} held-out clips, best epoch {}, held-out macro accuracy "
                        "{:.4f}{}",
                        corpus.minutes_per_class, s.train.size(), s.val.size(), held_out.size(),
                        result.log.best_epoch, rep.macro_accuracy, per_set)};
}

void write_split_files(const fs::path& dir) {
    const auto& s = synthetic_corpus().splits;
    const auto write = [&](const std::string& name, const std::vector<dataset::Clip>& clips) {
        std::ofstream out(dir / name);
        dataset::write_clips_csv(out, clips, s.n);
    };
    write("synthetic.train.csv", s.train);
    write("synthetic.val.csv", s.val);
    for (const auto& [name, clips] : s.evaluation) write("synthetic." + name + ".csv", clips);
}

// 7. Byte-identical checkpoints and logs from two train runs.
Outcome determinism() {
    const auto dir = work_dir();
    write_split_files(dir);
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
        const auto ckpt = dir / fmt::format("model{}.bin", run);
        const auto log = dir / fmt::format("train{}.csv", run);
        std::ostringstream out, err;
        const int code = cli::run({"train", "--dataset", (dir / "synthetic.csv").string(), "--batch-size", "50",
                                   "--epochs", "40", "--seed", "1234", "--quiet", "--out", ckpt.string(), "--log",
                                   log.string()},
                                  out, err);
        if (code != 0) return {false, fmt::format("train run {} exited {}: {}", run, code, err.str())};
        outputs.push_back(slurp(ckpt));
        outputs.push_back(slurp(log));
    }
    const bool same_ckpt = outputs[0] == outputs[2], same_log = outputs[1] == outputs[3];
    return {same_ckpt && same_log && !outputs[0].empty(),
            fmt::format("checkpoint {} ({} bytes), log {} ({} bytes)", same_ckpt ? "identical" : "differs",
                        outputs[0].size(), same_log ? "identical" : "differs", outputs[1].size())};
}

// 8. metrics.json carries the reference numbers next to measured values.
Outcome paper_ledger() {
    const auto dir = work_dir();
    if (!fs::exists(dir / "model0.bin")) return {false, "no checkpoint from the determinism run"};
    std::ostringstream out, err;
    const int code = cli::run({"eval", "--model", (dir / "model0.bin").string(), "--dataset",
                               (dir / "synthetic.eval1.csv").string(), "--name", "eval1", "--out",
                               (dir / "metrics.json").string()},
                              out, err);
    if (code != 0) return {false, fmt::format("eval exited {}: {}", code, err.str())};
    const auto j = nlohmann::json::parse(slurp(dir / "metrics.json"));
    const auto& ref = j.at("paper_reference");
    const bool refs = ref.at("val_precision").at("n7").get<double>() == 0.9613 &&
                      ref.at("eval1").at("n7").at("macro_accuracy").get<double>() == 0.7775 &&
                      ref.at("eval2").at("n7").at("macro_accuracy").get<double>() == 0.8903 &&
                      ref.at("headline_macro_accuracy").get<double>() == 0.819;
    const auto& measured = j.at("measured");
    const bool meas = measured.at("macro_accuracy").is_number() && measured.at("weighted_precision").is_number();
    const double measured_acc = measured.at("macro_accuracy").get<double>();
    const bool div = std::abs(j.at("divergence").at("macro_accuracy_minus_eval1_n7").get<double>() -
                              (measured_acc - 0.7775)) < 1e-12;
    return {refs && meas && div, fmt::format("reference fields {}, measured eval1 macro accuracy {:.4f} vs 0.7775",
                                             refs ? "present" : "missing", measured_acc)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "gradient oracle", 30.0, gradient_oracle},
        {2, "codec round trip", 5.0, codec_round_trip},
        {3, "gain invariants", 0.0, gain_invariants},
        {4, "window law", 0.0, window_law},
        {5, "correlation reproduction", 60.0, correlation},
        {6, "synthetic end-to-end", 600.0, synthetic_end_to_end},
        {7, "determinism", 0.0, determinism},
        {8, "paper-value ledger", 0.0, paper_ledger},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const double start = cpu_seconds();
        const auto wall_start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double cpu = cpu_seconds() - start;
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        std::string timing = fmt::format("{:.2f} s cpu, {:.2f} s wall", cpu, wall);
        if (c.cpu_budget_s > 0.0) {
            timing += fmt::format(", budget {:.0f} s", c.cpu_budget_s);
            if (cpu > c.cpu_budget_s) {
                o.pass = false;
                timing += " EXCEEDED";
            }
        }
        if (!o.pass) ++failures;
        std::cout << fmt::format("[{}] {}. {}: {} ({})\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail, timing)
                  << std::flush;
    }
    std::cout << fmt::format("{}/{} acceptance criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
