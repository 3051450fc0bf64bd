#pragma once
// Core domain vocabulary: files, tables, databases, candidates, plans and the
// engine configuration. Everything here is an immutable value object once
// constructed; all higher modules share these types read-only.
//
// Unit conventions:
//   - sizes are bytes (int64)
//   - timestamps are integer epoch seconds, no time zones
//   - GBHr values use decimal gigabytes (1e9 bytes)

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lakecomp {

using Timestamp = std::int64_t;

constexpr std::int64_t kBytesPerDecimalGb = 1'000'000'000;
constexpr std::int64_t kDefaultTargetFileSizeBytes = 512ll * 1024 * 1024;

// Reserved partition key for unpartitioned tables. Internal only; it never
// appears in plans, schedules or explain output.
inline const std::string kDefaultPartitionKey = "__default";

struct FileRecord {
    std::string file_id;
    std::int64_t size_bytes = 0;
    Timestamp created_at = 0;
    // Matches the owning partition map key; kDefaultPartitionKey when the
    // table is unpartitioned.
    std::string partition_key;

    friend bool operator==(const FileRecord&, const FileRecord&) = default;
};

struct TableId {
    std::string database;
    std::string name;

    std::string str() const { return database + "." + name; }

    friend auto operator<=>(const TableId&, const TableId&) = default;
};

struct TableState {
    TableId table_id;
    Timestamp created_at = 0;
    Timestamp last_write_at = 0;
    bool is_partitioned = false;
    // Unpartitioned tables hold exactly one entry keyed kDefaultPartitionKey.
    std::map<std::string, std::vector<FileRecord>> partitions;

    std::int64_t file_count() const;
    std::int64_t total_bytes() const;

    friend bool operator==(const TableState&, const TableState&) = default;
};

struct DatabaseState {
    std::string database_id;
    // Filesystem-object quota, counted in number of objects. used_quota may
    // exceed total_quota (quota breaches happen in real deployments).
    std::int64_t used_quota = 0;
    std::int64_t total_quota = 1;
    std::vector<TableState> tables;

    friend bool operator==(const DatabaseState&, const DatabaseState&) = default;
};

enum class ScopeKind { Table, Partition };

struct CandidateScope {
    ScopeKind kind = ScopeKind::Table;
    TableId table_id;
    // Present iff kind == Partition.
    std::optional<std::string> partition_key;

    friend auto operator<=>(const CandidateScope&, const CandidateScope&) = default;
};

// Stable, injective encoding of a scope: "db.table" or "db.table/partition".
// Injectivity relies on ingest validation (no '.' or '/' in database ids, no
// '/' in table names).
std::string candidate_id_of(const CandidateScope& scope);

struct CandidateStats {
    std::int64_t file_count = 0;
    std::int64_t total_bytes = 0;
    // Files strictly below the configured target file size.
    std::int64_t small_file_count = 0;
    // Copied from the owning table.
    Timestamp created_at = 0;
    Timestamp last_write_at = 0;

    friend bool operator==(const CandidateStats&, const CandidateStats&) = default;
};

struct Candidate {
    std::string candidate_id;
    CandidateScope scope;
    std::vector<FileRecord> files;
    CandidateStats stats;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

enum class ScopeStrategy { TableOnly, Hybrid };

enum class RankingMode { ThresholdUnconstrained, MoopConstrained };

struct EngineConfig {
    std::int64_t target_file_size_bytes = kDefaultTargetFileSizeBytes;
    double executor_memory_gb = 8.0;
    // Estimated rewrite throughput used for costing, bytes per hour.
    double rewrite_bytes_per_hour = 200.0 * kBytesPerDecimalGb;

    RankingMode ranking_mode = RankingMode::MoopConstrained;
    // Moop mode: trait name -> weight, must sum to 1 within 1e-9.
    std::map<std::string, double> weights = {
        {"file_count_reduction", 0.7},
        {"compute_cost_gbhr", 0.3},
    };
    // Threshold mode: trait name -> trigger threshold on the raw value.
    std::map<std::string, double> thresholds;

    std::optional<double> budget_gbhr;
    std::optional<std::int64_t> k;

    ScopeStrategy scope_strategy = ScopeStrategy::TableOnly;

    // Filter settings. A window of 0 disables the corresponding rule.
    std::int64_t min_table_age_seconds = 86'400;
    std::int64_t recent_write_window_seconds = 0;
    std::int64_t min_candidate_bytes = 0;

    // Scale the benefit weight with the owning database's quota utilization.
    bool quota_adaptive_w1 = false;

    std::int64_t max_parallel = 8;

    // Throws ConfigError on violated invariants (weight sum, positivity,
    // missing budget/k in constrained mode).
    void validate() const;
};

// One term of a task's score: score == sum of signed contributions.
struct RationaleEntry {
    std::string trait_name;
    double raw_value = 0.0;
    double normalized_value = 0.0;
    double weight = 0.0;
    double contribution = 0.0;

    friend bool operator==(const RationaleEntry&, const RationaleEntry&) = default;
};

struct CompactionTask {
    std::string candidate_id;
    CandidateScope scope;
    double estimated_gbhr = 0.0;
    double score = 0.0;
    std::vector<RationaleEntry> rationale;

    friend bool operator==(const CompactionTask&, const CompactionTask&) = default;
};

struct Exclusion {
    std::string candidate_id;
    std::string reason;
    // For budget exclusions: budget left at the moment the candidate was
    // considered and skipped.
    std::optional<double> remaining_budget_gbhr;

    friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

struct CompactionPlan {
    Timestamp generated_at = 0;
    // Execution priority order.
    std::vector<CompactionTask> tasks;
    std::vector<Exclusion> excluded;
    double total_estimated_gbhr = 0.0;

    friend bool operator==(const CompactionPlan&, const CompactionPlan&) = default;
};

}  // namespace lakecomp
