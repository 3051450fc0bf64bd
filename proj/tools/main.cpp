// lakecomp: operator CLI for planning, explaining and simulating compaction.
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lakecomp/config.hpp"
#include "lakecomp/errors.hpp"
#include "lakecomp/pipeline.hpp"
#include "lakecomp/simulator.hpp"
#include "lakecomp/snapshot.hpp"

namespace {

using namespace lakecomp;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EngineError("cannot open '" + path + "' for writing");
    out << content;
}

SnapshotDocument load_snapshot_checked(const std::string& path, bool lenient) {
    std::vector<std::string> warnings;
    LoadOptions options;
    options.lenient = lenient;
    options.warnings = &warnings;
    SnapshotDocument doc = load_snapshot_file(path, options);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return doc;
}

int cmd_plan(const std::string& snapshot_path, const std::string& config_path, Timestamp now,
             const std::string& out_path, std::string schedule_path, bool lenient) {
    CliConfig config = load_cli_config_file(config_path);
    SnapshotDocument snapshot = load_snapshot_checked(snapshot_path, lenient);
    PipelineResult result = run_pipeline(snapshot, config.engine, now);

    if (schedule_path.empty()) schedule_path = out_path + ".schedule.json";
    write_file(out_path, to_canonical_string(plan_to_json(result.plan)));
    write_file(schedule_path, to_canonical_string(schedule_to_json(result.schedule)));
    return 0;
}

int cmd_explain(const std::string& snapshot_path, const std::string& config_path, Timestamp now,
                const std::string& candidate_id, bool as_json, bool lenient) {
    CliConfig config = load_cli_config_file(config_path);
    SnapshotDocument snapshot = load_snapshot_checked(snapshot_path, lenient);
    PipelineResult result = run_pipeline(snapshot, config.engine, now);
    nlohmann::json report = explain_candidate(result, config.engine, candidate_id);
    if (as_json)
        std::cout << to_canonical_string(report);
    else
        std::cout << explain_to_text(report);
    return 0;
}

std::string sanitize_name(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return out;
}

void print_summary_header() {
    std::cout << "strategy,final_files,small_files,total_gbhr,client_conflicts,cluster_conflicts\n";
}

void print_summary_row(const std::string& name, const SimResult& r) {
    const MetricsRow& last = r.metrics.back();
    char gbhr[64];
    std::snprintf(gbhr, sizeof(gbhr), "%.6f", r.total_gbhr);
    std::cout << name << ',' << last.total_files << ',' << last.small_files << ',' << gbhr << ','
              << r.total_client_conflicts << ',' << r.total_cluster_conflicts << "\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool compare) {
    CliConfig config = load_cli_config_file(config_path);
    if (!config.simulator) throw ConfigError("config has no 'simulator' section");
    std::filesystem::create_directories(out_dir);

    print_summary_header();
    if (compare) {
        auto results = compare_strategies(*config.simulator);
        for (const auto& [name, result] : results) {
            std::string base = (std::filesystem::path(out_dir) / sanitize_name(name)).string();
            write_file(base + ".csv", metrics_to_csv(result.metrics));
            write_file(base + ".events.jsonl", events_to_jsonl(result.events));
            print_summary_row(name, result);
        }
    } else {
        SimResult result = run_simulation(*config.simulator);
        std::string base = (std::filesystem::path(out_dir) / "metrics").string();
        write_file(base + ".csv", metrics_to_csv(result.metrics));
        write_file((std::filesystem::path(out_dir) / "events.jsonl").string(),
                   events_to_jsonl(result.events));
        print_summary_row("sim", result);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"budget-aware compaction planner and data-lake simulator"};
    app.require_subcommand(1);

    std::string snapshot_path, config_path, out_path, schedule_path, candidate_id, out_dir;
    Timestamp now = 0;
    bool lenient = false;
    bool as_json = false;
    bool compare = false;

    CLI::App* plan = app.add_subcommand("plan", "build a compaction plan and dispatch schedule");
    plan->add_option("--snapshot", snapshot_path, "snapshot JSON path")->required();
    plan->add_option("--config", config_path, "config JSON path")->required();
    plan->add_option("--now", now, "decision time, epoch seconds")->required();
    plan->add_option("--out", out_path, "plan output path")->required();
    plan->add_option("--schedule-out", schedule_path,
                     "schedule output path (default: <out>.schedule.json)");
    plan->add_flag("--lenient", lenient, "downgrade unknown snapshot fields to warnings");

    CLI::App* explain = app.add_subcommand("explain", "explain one candidate's decision");
    explain->add_option("--snapshot", snapshot_path, "snapshot JSON path")->required();
    explain->add_option("--config", config_path, "config JSON path")->required();
    explain->add_option("--now", now, "decision time, epoch seconds")->required();
    explain->add_option("--candidate", candidate_id, "candidate id")->required();
    explain->add_flag("--json", as_json, "emit machine-readable JSON");
    explain->add_flag("--lenient", lenient, "downgrade unknown snapshot fields to warnings");

    CLI::App* simulate = app.add_subcommand("simulate", "run the data-lake simulator");
    simulate->add_option("--config", config_path, "config JSON path")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_flag("--compare", compare, "run every configured strategy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(plan))
            return cmd_plan(snapshot_path, config_path, now, out_path, schedule_path, lenient);
        if (app.got_subcommand(explain))
            return cmd_explain(snapshot_path, config_path, now, candidate_id, as_json, lenient);
        if (app.got_subcommand(simulate)) return cmd_simulate(config_path, out_dir, compare);
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UnsupportedVersionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UnknownCandidateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UnknownTableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
