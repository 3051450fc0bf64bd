#include <doctest.h>

#include <cmath>

#include "lakecomp/errors.hpp"
#include "lakecomp/simulator.hpp"

using namespace lakecomp;

namespace {

constexpr std::int64_t kMiB = 1024 * 1024;

// One database, one unpartitioned table, no background writes.
SimConfig static_table_config(std::int64_t files, std::int64_t file_size) {
    SimConfig cfg;
    cfg.seed = 99;
    cfg.duration_seconds = 600;
    cfg.database_count = 1;
    cfg.topology.partitioned_tables_per_database = 0;
    cfg.topology.unpartitioned_tables_per_database = 1;
    cfg.topology.initial_files_per_unpartitioned_table = files;
    PatternSpec quiet;
    quiet.kind = PatternSpec::Kind::Sinusoidal;
    quiet.base_rate = 0.0;
    quiet.file_size_min_bytes = file_size;
    quiet.file_size_max_bytes = file_size;
    cfg.patterns = {quiet};
    cfg.execution.rewrite_bytes_per_hour = 4e12;
    return cfg;
}

CompactionSetup basic_compaction(std::int64_t k, ScopeStrategy strategy,
                                 std::int64_t interval) {
    CompactionSetup setup;
    setup.engine.k = k;
    setup.engine.scope_strategy = strategy;
    setup.engine.min_table_age_seconds = 60;
    setup.trigger.kind = TriggerMode::Kind::Periodic;
    setup.trigger.interval_seconds = interval;
    return setup;
}

SimConfig busy_config() {
    SimConfig cfg;
    cfg.seed = 1234;
    cfg.duration_seconds = 1'200;
    cfg.database_count = 2;
    cfg.topology.partitioned_tables_per_database = 1;
    cfg.topology.initial_partitions_per_table = 3;
    cfg.topology.initial_files_per_partition = 6;
    cfg.topology.unpartitioned_tables_per_database = 1;
    cfg.topology.initial_files_per_unpartitioned_table = 5;
    cfg.topology.partition_bucket_seconds = 300;
    PatternSpec steady;
    steady.base_rate = 0.05;
    steady.write_mix = 0.8;
    steady.files_per_write_min = 2;
    steady.files_per_write_max = 5;
    cfg.patterns = {steady};
    cfg.execution.rewrite_bytes_per_hour = 4e12;
    return cfg;
}

}  // namespace

TEST_CASE("no compaction: file count never decreases") {
    SimConfig cfg = busy_config();
    SimResult result = run_simulation(cfg);
    REQUIRE(result.metrics.size() > 2);
    for (std::size_t i = 1; i < result.metrics.size(); ++i)
        CHECK(result.metrics[i].total_files >= result.metrics[i - 1].total_files);
    CHECK(result.metrics.back().total_files > result.metrics.front().total_files);
    CHECK(result.total_cluster_conflicts == 0);
    CHECK(result.total_client_conflicts == 0);
}

TEST_CASE("identical config yields byte-identical output") {
    SimConfig cfg = busy_config();
    cfg.compaction = basic_compaction(3, ScopeStrategy::Hybrid, 300);
    SimResult a = run_simulation(cfg);
    SimResult b = run_simulation(cfg);
    CHECK(metrics_to_csv(a.metrics) == metrics_to_csv(b.metrics));
    CHECK(events_to_jsonl(a.events) == events_to_jsonl(b.events));
    CHECK(write_snapshot(a.final_snapshot) == write_snapshot(b.final_snapshot));
}

TEST_CASE("one compaction packs files to the target with a remainder") {
    // 100 files x 52 MiB = 5200 MiB; at a 512 MiB target that packs into
    // ceil(5200/512) = 11 files: 10 full and one 80 MiB remainder.
    SimConfig cfg = static_table_config(100, 52 * kMiB);
    cfg.compaction = basic_compaction(1, ScopeStrategy::TableOnly, 300);
    SimResult result = run_simulation(cfg);

    bool found = false;
    for (const auto& e : result.events) {
        if (e.kind != "task_done") continue;
        found = true;
        CHECK(e.detail.at("files_removed") == 100);
        CHECK(e.detail.at("files_added") == 11);
        CHECK(e.detail.at("bytes_in") == 100ll * 52 * kMiB);
        CHECK(e.detail.at("bytes_out") == e.detail.at("bytes_in"));
    }
    REQUIRE(found);

    const auto& final_table = result.final_snapshot.databases[0].tables[0];
    REQUIRE(final_table.file_count() == 11);
    std::int64_t full = 0, remainder = 0;
    for (const auto& [key, files] : final_table.partitions)
        for (const auto& f : files) {
            if (f.size_bytes == 512 * kMiB) ++full;
            if (f.size_bytes == 80 * kMiB) ++remainder;
        }
    CHECK(full == 10);
    CHECK(remainder == 1);
}

TEST_CASE("conservation: total equals initial plus adds minus removes") {
    SimConfig cfg = busy_config();
    cfg.compaction = basic_compaction(5, ScopeStrategy::Hybrid, 300);
    SimResult result = run_simulation(cfg);
    REQUIRE(!result.metrics.empty());
    std::int64_t running = result.metrics[0].total_files;
    for (std::size_t i = 1; i < result.metrics.size(); ++i) {
        running += result.metrics[i].files_added - result.metrics[i].files_removed;
        CHECK(result.metrics[i].total_files == running);
    }
    // A task never leaves its scope with more files than it consumed.
    for (const auto& e : result.events) {
        if (e.kind != "task_done") continue;
        CHECK(e.detail.at("files_added").get<std::int64_t>() <=
              e.detail.at("files_removed").get<std::int64_t>());
    }
}

TEST_CASE("compaction strictly reduces the final file count") {
    SimConfig cfg = busy_config();
    SimResult baseline = run_simulation(cfg);
    cfg.compaction = basic_compaction(10, ScopeStrategy::Hybrid, 300);
    SimResult compacted = run_simulation(cfg);
    CHECK(compacted.metrics.back().total_files < baseline.metrics.back().total_files);
    CHECK(compacted.metrics.back().small_files < baseline.metrics.back().small_files);
}

TEST_CASE("strategies see the identical write workload") {
    SimConfig cfg = busy_config();
    cfg.strategies = {{"none", std::nullopt},
                      {"hybrid-5", basic_compaction(5, ScopeStrategy::Hybrid, 300)}};
    auto results = compare_strategies(cfg);
    REQUIRE(results.size() == 2);

    // The pre-generated workload is shared: same number of write commits
    // with the same payloads (retries may shift commit times).
    auto writes_of = [](const SimResult& r) {
        std::vector<std::string> out;
        for (const auto& e : r.events)
            if (e.kind == "write") {
                nlohmann::json key = e.detail;
                key.erase("retried");
                out.push_back(key.dump());
            }
        std::sort(out.begin(), out.end());
        return out;
    };
    CHECK(writes_of(results[0].result) == writes_of(results[1].result));

    // Aligned metric grids.
    REQUIRE(results[0].result.metrics.size() == results[1].result.metrics.size());
    for (std::size_t i = 0; i < results[0].result.metrics.size(); ++i)
        CHECK(results[0].result.metrics[i].t == results[1].result.metrics[i].t);
}

TEST_CASE("per-trigger charged GBHr respects the budget") {
    SimConfig cfg = busy_config();
    CompactionSetup setup = basic_compaction(50, ScopeStrategy::Hybrid, 300);
    setup.engine.budget_gbhr = 0.02;
    cfg.compaction = setup;
    SimResult result = run_simulation(cfg);
    for (const auto& e : result.events) {
        if (e.kind != "trigger") continue;
        CHECK(e.detail.at("estimated_gbhr").get<double>() <= 0.02 + 1e-12);
    }
}

TEST_CASE("growth calibration holds within ten percent") {
    // 0.02 events/s * 3600 = 72 events/h; every event writes 3 files.
    SimConfig cfg;
    cfg.seed = 5;
    cfg.duration_seconds = 3 * 3'600;
    cfg.database_count = 1;
    cfg.topology.unpartitioned_tables_per_database = 1;
    cfg.topology.partitioned_tables_per_database = 1;
    cfg.topology.initial_partitions_per_table = 2;
    cfg.topology.initial_files_per_partition = 2;
    cfg.topology.initial_files_per_unpartitioned_table = 2;
    PatternSpec p;
    p.base_rate = 0.02;
    p.files_per_write_min = 3;
    p.files_per_write_max = 3;
    p.write_mix = 1.0;
    cfg.patterns = {p};
    SimResult result = run_simulation(cfg);
    double hours = cfg.duration_seconds / 3600.0;
    double growth = (result.metrics.back().total_files - result.metrics.front().total_files) /
                    hours;
    double expected = 72.0 * 3.0;
    CHECK(std::abs(growth - expected) <= 0.1 * expected);
}

TEST_CASE("post-write trigger compacts a fragmented table") {
    SimConfig cfg = static_table_config(80, 10 * kMiB);
    cfg.duration_seconds = 1'200;
    // Trickle writes so the hook has events to react to.
    cfg.patterns[0].base_rate = 0.01;
    cfg.patterns[0].files_per_write_min = 1;
    cfg.patterns[0].files_per_write_max = 2;
    cfg.topology.unpartitioned_write_weight = 1.0;

    CompactionSetup setup;
    setup.engine.k = 1;
    setup.engine.min_table_age_seconds = 60;
    setup.trigger.kind = TriggerMode::Kind::PostWrite;
    setup.trigger.debounce_seconds = 120;
    setup.trigger.thresholds = {{"small_file_fraction", 0.5}};
    cfg.compaction = setup;

    SimResult result = run_simulation(cfg);
    bool hook_fired = false;
    bool compacted = false;
    for (const auto& e : result.events) {
        if (e.kind == "hook_trigger") hook_fired = true;
        if (e.kind == "task_done") compacted = true;
    }
    CHECK(hook_fired);
    CHECK(compacted);
    CHECK(result.metrics.back().total_files < 80);
}

TEST_CASE("overlapping runs never double-compact a table") {
    // Triggers every 30 s while a table rewrite takes ~260 s, so later runs
    // plan tasks whose tables are still busy. Conservation must survive.
    SimConfig cfg = busy_config();
    cfg.execution.rewrite_bytes_per_hour = 2e10;  // slow executor
    CompactionSetup setup = basic_compaction(10, ScopeStrategy::TableOnly, 30);
    cfg.compaction = setup;
    SimResult result = run_simulation(cfg);

    std::int64_t running = result.metrics.front().total_files;
    for (std::size_t i = 1; i < result.metrics.size(); ++i) {
        running += result.metrics[i].files_added - result.metrics[i].files_removed;
        CHECK(result.metrics[i].total_files == running);
    }
    for (const auto& e : result.events) {
        if (e.kind != "task_done") continue;
        CHECK(e.detail.at("bytes_out") == e.detail.at("bytes_in"));
        CHECK(e.detail.at("files_added").get<std::int64_t>() <=
              e.detail.at("files_removed").get<std::int64_t>());
    }
    validate_snapshot(result.final_snapshot);

    // Total bytes in the lake match: initial + written - nothing lost.
    std::int64_t final_bytes = 0;
    for (const auto& db : result.final_snapshot.databases)
        for (const auto& t : db.tables) final_bytes += t.total_bytes();
    std::int64_t written = 0;
    for (const auto& e : result.events)
        if (e.kind == "write") written += e.detail.at("bytes").get<std::int64_t>();
    SimConfig baseline_cfg = busy_config();
    baseline_cfg.execution.rewrite_bytes_per_hour = 2e10;
    SimResult baseline = run_simulation(baseline_cfg);
    std::int64_t initial_bytes = 0;
    for (const auto& db : baseline.final_snapshot.databases)
        for (const auto& t : db.tables) initial_bytes += t.total_bytes();
    std::int64_t baseline_written = 0;
    for (const auto& e : baseline.events)
        if (e.kind == "write") baseline_written += e.detail.at("bytes").get<std::int64_t>();
    CHECK(final_bytes == initial_bytes - baseline_written + written);
}

TEST_CASE("blackout windows suppress periodic triggers") {
    SimConfig cfg = static_table_config(50, 10 * kMiB);
    CompactionSetup setup = basic_compaction(1, ScopeStrategy::TableOnly, 300);
    // start_epoch is a multiple of 86400 plus nothing: cover the whole day.
    setup.trigger.blackout_windows = {{0, 86'400}};
    cfg.compaction = setup;
    SimResult result = run_simulation(cfg);
    for (const auto& e : result.events) {
        CHECK(e.kind != "trigger");
        CHECK(e.kind != "task_start");
    }
    CHECK(result.metrics.back().total_files == 50);
}

TEST_CASE("files at or above the target never count as small") {
    SimConfig cfg = static_table_config(10, 512 * kMiB);
    SimResult result = run_simulation(cfg);
    CHECK(result.metrics.back().total_files == 10);
    CHECK(result.metrics.back().small_files == 0);
}

TEST_CASE("invalid configs are rejected") {
    SimConfig cfg = busy_config();
    cfg.duration_seconds = 0;
    CHECK_THROWS_AS(run_simulation(cfg), ConfigError);

    SimConfig no_patterns = busy_config();
    no_patterns.patterns.clear();
    CHECK_THROWS_AS(run_simulation(no_patterns), ConfigError);

    SimConfig no_strategies = busy_config();
    CHECK_THROWS_AS(compare_strategies(no_strategies), ConfigError);
}
