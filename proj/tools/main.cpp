#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "suppcom/commands.hpp"
#include "suppcom/config.hpp"
#include "suppcom/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Supplementary comment generation from issue reports"};
    app.set_version_flag("--version", std::string(suppcom::kToolVersion));
    app.require_subcommand(1);

    std::string config_path = "suppcom.json";
    std::string out;
    bool offline = false;
    bool resume = true;
    std::size_t concurrency = 0;
    app.add_option("--config", config_path, "Pipeline configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out, "Output directory (overrides output_dir)");
    app.add_flag("--offline", offline, "Refuse all network access");
    app.add_flag("--resume,!--no-resume", resume, "Skip stages whose inputs are unchanged (default on)");
    app.add_option("--concurrency", concurrency, "Worker threads")->check(CLI::PositiveNumber);

    struct Command {
        const char* name;
        const char* help;
        suppcom::StageResult (suppcom::Pipeline::*run)();
    };
    const Command commands[] = {
        {"mine", "Mine method/comment pairs into methods.jsonl and comments.jsonl", &suppcom::Pipeline::mine},
        {"ingest-issues", "Ingest issue reports into issues.jsonl", &suppcom::Pipeline::ingest_issues},
        {"link", "Link methods to issues through commit messages", &suppcom::Pipeline::link},
        {"dataset", "Filter triples by supplementarity and issue overlap", &suppcom::Pipeline::dataset},
        {"generate", "Retrieve evidence, generate and verify comments", &suppcom::Pipeline::generate},
        {"evaluate", "Compute coverage, verifiability and supplementarity", &suppcom::Pipeline::evaluate},
        {"report", "Render report.md and report.csv from report.json", &suppcom::Pipeline::report},
        {"run", "Run every stage from mine to evaluate", &suppcom::Pipeline::run_all},
    };
    for (const auto& c : commands) app.add_subcommand(c.name, c.help);

    CLI11_PARSE(app, argc, argv);

    try {
        suppcom::PipelineConfig config = suppcom::load_config(config_path);
        suppcom::RunOptions options;
        if (!out.empty()) options.out = out;
        options.offline = offline;
        options.resume = resume;
        if (concurrency > 0) options.concurrency = concurrency;
        suppcom::Pipeline pipeline(std::move(config), options);
        for (const auto& c : commands) {
            if (app.got_subcommand(c.name)) return (pipeline.*c.run)().exit_code;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return suppcom::kExitFatal;
    }
    return suppcom::kExitFatal;
}
