#pragma once
// Closed-loop discrete-event simulation of a data lake under mixed write
// workloads, with the compaction pipeline optionally running against the
// live state. Time advances in whole seconds; metrics aggregate per interval.
//
// Determinism: the entire write workload (event times, targets, file counts
// and sizes) is pre-generated from the seed before the event loop starts, so
// runs that differ only in compaction settings see the identical workload.
//
// World model:
//   - writes append files to a table; partitioned tables bucket incoming
//     files by event time (one partition per bucket window), unpartitioned
//     tables append to their single partition
//   - a compaction task replaces its captured input files with
//     ceil(bytes/target) output files, all at target size except the
//     remainder; bytes are conserved exactly
//   - a write into the scope of an executing task is a cluster-side
//     conflict: the task aborts, its rewrite is lost
//   - a write committing while any task is in flight on the same table is a
//     client-side conflict: the write retries once after a fixed backoff
//   - estimated GBHr is charged when a task starts; aborted work is not
//     refunded

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakecomp/scheduler.hpp"
#include "lakecomp/snapshot.hpp"
#include "lakecomp/types.hpp"

namespace lakecomp {

struct PatternSpec {
    enum class Kind { Sinusoidal, ShortBurst, LargeBurst, Clocked };
    Kind kind = Kind::Sinusoidal;

    // Sinusoidal: events/sec = base_rate + amplitude * sin(2*pi*t/period).
    // Bursts: events/sec = base_rate inside each burst window, else 0.
    // Clocked: floor(base_rate) events at each fire time.
    double base_rate = 0.01;
    double amplitude = 0.0;
    std::int64_t period_seconds = 3'600;
    std::int64_t burst_seconds = 60;
    std::int64_t spacing_seconds = 600;
    std::vector<std::int64_t> fire_times;  // sim-relative seconds

    double write_mix = 1.0;  // fraction of events that are writes
    std::int64_t files_per_write_min = 1;
    std::int64_t files_per_write_max = 1;
    // File sizes drawn log-uniform from [min, max].
    std::int64_t file_size_min_bytes = 1ll << 20;
    std::int64_t file_size_max_bytes = 256ll << 20;

    void validate() const;
};

struct TopologySpec {
    std::int64_t partitioned_tables_per_database = 1;
    std::int64_t initial_partitions_per_table = 24;
    std::int64_t initial_files_per_partition = 20;
    std::int64_t unpartitioned_tables_per_database = 3;
    std::int64_t initial_files_per_unpartitioned_table = 50;
    // Width of the time bucket that maps a write to a partition.
    std::int64_t partition_bucket_seconds = 3'600;
    // Relative chance of a write landing on each table group.
    double partitioned_write_weight = 1.0;
    double unpartitioned_write_weight = 0.0;
    std::int64_t total_quota_per_database = 1'000'000;
    std::int64_t initial_table_age_seconds = 30ll * 86'400;

    void validate() const;
};

struct ConflictModel {
    double client_conflict_prob_per_overlap = 1.0;
    bool cluster_abort_on_overlap = true;
    std::int64_t client_retry_backoff_seconds = 30;

    void validate() const;
};

struct CompactionSetup {
    EngineConfig engine;
    TriggerMode trigger;
};

struct ExecutionModel {
    // Actual rewrite throughput; may differ from the engine's estimate.
    double rewrite_bytes_per_hour = 200.0 * kBytesPerDecimalGb;
    // Packing target; defaults to the engine's target file size.
    std::optional<std::int64_t> target_file_size_bytes;

    void validate() const;
};

struct StrategySpec {
    std::string name;
    std::optional<CompactionSetup> compaction;  // nullopt = no compaction
};

struct SimConfig {
    std::uint64_t seed = 1;
    std::int64_t duration_seconds = 3'600;
    std::int64_t metrics_interval_seconds = 60;
    std::int64_t database_count = 1;
    Timestamp start_epoch = 1'700'000'000;
    TopologySpec topology;
    // Database i draws its workload from patterns[i % patterns.size()].
    std::vector<PatternSpec> patterns;
    std::optional<CompactionSetup> compaction;
    ConflictModel conflict;
    ExecutionModel execution;
    // Named variants for compare runs; each differs only in compaction.
    std::vector<StrategySpec> strategies;

    void validate() const;  // throws ConfigError
};

struct MetricsRow {
    std::int64_t t = 0;  // sim-relative seconds, end of interval
    std::int64_t total_files = 0;
    std::int64_t small_files = 0;
    std::int64_t files_added = 0;    // writes + compaction outputs, this interval
    std::int64_t files_removed = 0;  // consumed by compaction, this interval
    double compaction_gbhr = 0.0;    // estimated GBHr charged this interval
    std::int64_t client_conflicts = 0;
    std::int64_t cluster_conflicts = 0;
    std::int64_t tables_compacted = 0;  // distinct tables with a completed task
};

struct SimEventRecord {
    std::int64_t t = 0;
    std::string kind;
    nlohmann::json detail;
};

struct SimResult {
    std::vector<MetricsRow> metrics;
    SnapshotDocument final_snapshot;
    std::vector<SimEventRecord> events;
    double total_gbhr = 0.0;
    std::int64_t total_client_conflicts = 0;
    std::int64_t total_cluster_conflicts = 0;
};

SimResult run_simulation(const SimConfig& config);

struct StrategyResult {
    std::string name;
    SimResult result;
};

// Runs every configured strategy against the identical workload (same seed,
// same pre-generated event stream). Throws ConfigError when no strategies
// are configured.
std::vector<StrategyResult> compare_strategies(const SimConfig& base);

// Header: t,total_files,small_files,files_added,files_removed,
// compaction_gbhr,client_conflicts,cluster_conflicts,tables_compacted.
// One row per interval, LF endings, plain decimal numbers.
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);

// Line-delimited JSON: {"t": ..., "kind": ..., "detail": {...}}.
std::string events_to_jsonl(const std::vector<SimEventRecord>& events);

}  // namespace lakecomp
