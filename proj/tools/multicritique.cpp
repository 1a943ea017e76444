// Stage-oriented driver for the multi-agent critique data pipeline.
//
// Exit codes: 0 ok, 2 config error, 3 stage failure, 4 run-dir lock held.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mc/common.hpp"
#include "mc/mock.hpp"
#include "mc/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr int kExitLock = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-agent critique dataset pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string run_dir;
    std::vector<std::string> stage_names;
    std::int64_t seed_override = -1;

    auto* run = app.add_subcommand("run", "execute pipeline stages");
    run->add_option("--config", config_path, "pipeline config JSON")->required();
    run->add_option("--stages", stage_names,
                    "subset of stages to run (prepare crucial critique meta summarize pair mars "
                    "emit verify); default all");
    run->add_option("--run-dir", run_dir, "override run_dir from the config");
    run->add_option("--seed", seed_override, "override seed from the config");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "summarize a completed run");
    report->add_option("run_dir", report_dir, "run directory")->required();
    bool report_json = false;
    report->add_flag("--json", report_json, "emit the manifest JSON instead of text");

    std::string verify_dir;
    auto* verify = app.add_subcommand("verify", "check emitted datasets");
    verify->add_option("run_dir", verify_dir, "run directory")->required();

    auto* fixtures = app.add_subcommand("fixtures", "manage the mock fixture corpus");
    std::string fx_dir, fx_template, fx_request, fx_response;
    auto* fx_list = fixtures->add_subcommand("list", "list fixtures in a corpus directory");
    fx_list->add_option("dir", fx_dir, "corpus directory")->required();
    auto* fx_digest =
        fixtures->add_subcommand("digest", "print the fixture name for a request JSON");
    fx_digest->add_option("--template", fx_template, "template id")->required();
    fx_digest->add_option("--request", fx_request,
                          "request JSON file: {model, messages:[{role,content}]}")
        ->required();
    auto* fx_add = fixtures->add_subcommand("add", "store a fixture response for a request");
    fx_add->add_option("--dir", fx_dir, "corpus directory")->required();
    fx_add->add_option("--template", fx_template, "template id")->required();
    fx_add->add_option("--request", fx_request, "request JSON file")->required();
    fx_add->add_option("--response", fx_response, "response markdown file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            mc::PipelineConfig config = mc::load_config(config_path);
            if (!run_dir.empty()) config.run_dir = run_dir;
            if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
            const std::string dir = config.run_dir;
            std::vector<mc::Stage> stages;
            for (const auto& name : stage_names) stages.push_back(mc::stage_from_string(name));
            mc::PipelineRunner runner(std::move(config));
            runner.run(stages);
            std::cout << mc::report_text(dir);
            return kExitOk;
        }
        if (report->parsed()) {
            if (report_json) {
                std::cout << mc::parse_json(mc::read_file(
                                 (std::filesystem::path(report_dir) / "manifest.json").string()))
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << mc::report_text(report_dir);
            }
            return kExitOk;
        }
        if (verify->parsed()) {
            mc::VerifyReport result = mc::verify_run(verify_dir);
            std::cout << mc::verify_report_text(result);
            return result.ok() ? kExitOk : kExitStage;
        }
        if (fixtures->parsed()) {
            auto load_request = [&](mc::ChatRequest& request, mc::AgentSpec& spec) {
                const mc::Json j = mc::parse_json(mc::read_file(fx_request));
                spec.model_name = j.value("model", std::string{});
                request.template_id = mc::template_id_from_string(fx_template);
                for (const auto& m : j.at("messages"))
                    request.messages.push_back({m.at("role").get<std::string>(),
                                                m.at("content").get<std::string>()});
            };
            if (fx_list->parsed()) {
                std::vector<std::string> names;
                for (const auto& entry : std::filesystem::directory_iterator(fx_dir))
                    names.push_back(entry.path().filename().string());
                std::sort(names.begin(), names.end());
                for (const auto& name : names) std::cout << name << "\n";
                return kExitOk;
            }
            if (fx_digest->parsed()) {
                mc::ChatRequest request;
                mc::AgentSpec spec;
                load_request(request, spec);
                std::cout << mc::FixtureTransport::fixture_name(
                                 request.template_id, mc::request_digest(spec, request))
                          << "\n";
                return kExitOk;
            }
            if (fx_add->parsed()) {
                mc::ChatRequest request;
                mc::AgentSpec spec;
                load_request(request, spec);
                const std::string name = mc::FixtureTransport::fixture_name(
                    request.template_id, mc::request_digest(spec, request));
                const auto path = std::filesystem::path(fx_dir) / name;
                mc::write_file_atomic(path.string(), mc::read_file(fx_response));
                std::cout << "stored " << path.string() << "\n";
                return kExitOk;
            }
            std::cerr << "fixtures: choose list, digest, or add\n";
            return kExitConfig;
        }
    } catch (const mc::LockError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLock;
    } catch (const mc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return kExitConfig;
}
