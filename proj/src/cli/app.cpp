#include <ostream>

#include "common.hpp"

namespace gainprint::cli {

namespace {

void register_replay(CLI::App& app, Context& ctx, int& status) {
    auto* sub = app.add_subcommand("replay", "Re-run the command recorded in a run manifest");
    auto path = std::make_shared<std::string>();
    sub->add_option("--manifest", *path, "Manifest written by a previous run")->required();
    sub->callback([path, &ctx, &status] {
        const auto m = read_manifest(*path);
        if (!m.contains("argv") || !m["argv"].is_array()) throw InputError("manifest has no argv array");
        auto argv = m["argv"].get<std::vector<std::string>>();
        if (!argv.empty() && argv.front() == "replay") throw InputError("refusing to replay a replay");
        status = run(argv, ctx.out, ctx.err);
    });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"gainprint: muted-client audio telemetry emulation and activity inference", "gainprint"};
    app.require_subcommand(1);
    app.set_version_flag("--version", GAINPRINT_VERSION);

    Context ctx{out, err, args};
    int status = kExitOk;
    register_emulate(app, ctx, status);
    register_capture_decode(app, ctx, status);
    register_build_dataset(app, ctx, status);
    register_train(app, ctx, status);
    register_eval(app, ctx, status);
    register_correlate(app, ctx, status);
    register_synth(app, ctx, status);
    register_replay(app, ctx, status);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return status;
}

}  // namespace gainprint::cli
