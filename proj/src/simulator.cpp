#include "lakecomp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "lakecomp/errors.hpp"
#include "lakecomp/pipeline.hpp"

namespace lakecomp {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic draws. Hand-rolled mappings over mt19937_64 output so results
// do not depend on library-specific distribution implementations.
// ---------------------------------------------------------------------------

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) return lo;
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::int64_t log_uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) return lo;
    double u = u01(rng);
    double v = std::exp(std::log(static_cast<double>(lo)) +
                        u * (std::log(static_cast<double>(hi)) -
                             std::log(static_cast<double>(lo))));
    auto result = static_cast<std::int64_t>(std::llround(v));
    return std::clamp(result, lo, hi);
}

std::string zero_padded(const char* prefix, std::int64_t value, int width) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width,
                  static_cast<long long>(value));
    return buf;
}

// ---------------------------------------------------------------------------
// Workload pre-generation
// ---------------------------------------------------------------------------

struct WriteOp {
    std::int64_t t = 0;
    std::int64_t db = 0;
    std::int64_t table = 0;  // index within the database
    std::vector<std::int64_t> file_sizes;
};

double pattern_rate(const PatternSpec& p, std::int64_t t) {
    switch (p.kind) {
        case PatternSpec::Kind::Sinusoidal:
            return std::max(0.0, p.base_rate + p.amplitude * std::sin(2.0 * M_PI *
                                                                      static_cast<double>(t) /
                                                                      static_cast<double>(
                                                                          p.period_seconds)));
        case PatternSpec::Kind::ShortBurst:
        case PatternSpec::Kind::LargeBurst:
            return (t % p.spacing_seconds) < p.burst_seconds ? p.base_rate : 0.0;
        case PatternSpec::Kind::Clocked:
            return 0.0;  // handled via fire_times
    }
    return 0.0;
}

std::int64_t pick_table(const TopologySpec& topo, std::mt19937_64& rng) {
    double wp = static_cast<double>(topo.partitioned_tables_per_database) *
                topo.partitioned_write_weight;
    double wu = static_cast<double>(topo.unpartitioned_tables_per_database) *
                topo.unpartitioned_write_weight;
    std::int64_t n_part = topo.partitioned_tables_per_database;
    std::int64_t n_unpart = topo.unpartitioned_tables_per_database;
    double total = wp + wu;
    if (total <= 0.0) {
        // no weights: uniform over all tables
        return uniform_int(rng, 0, n_part + n_unpart - 1);
    }
    double x = u01(rng) * total;
    if (x < wp) {
        auto idx = static_cast<std::int64_t>(x / topo.partitioned_write_weight);
        return std::min(idx, n_part - 1);
    }
    auto idx = static_cast<std::int64_t>((x - wp) / topo.unpartitioned_write_weight);
    return n_part + std::min(idx, n_unpart - 1);
}

std::vector<WriteOp> generate_workload(const SimConfig& cfg, std::mt19937_64& rng) {
    std::vector<WriteOp> ops;
    for (std::int64_t db = 0; db < cfg.database_count; ++db) {
        const PatternSpec& p = cfg.patterns[db % cfg.patterns.size()];
        std::vector<std::int64_t> event_times;
        if (p.kind == PatternSpec::Kind::Clocked) {
            auto events_per_fire = static_cast<std::int64_t>(p.base_rate);
            for (std::int64_t ft : p.fire_times) {
                if (ft < 0 || ft >= cfg.duration_seconds) continue;
                for (std::int64_t i = 0; i < events_per_fire; ++i) event_times.push_back(ft);
            }
            std::sort(event_times.begin(), event_times.end());
        } else {
            double acc = 0.0;
            for (std::int64_t t = 0; t < cfg.duration_seconds; ++t) {
                acc += pattern_rate(p, t);
                while (acc >= 1.0) {
                    event_times.push_back(t);
                    acc -= 1.0;
                }
            }
        }
        for (std::int64_t t : event_times) {
            if (p.write_mix < 1.0 && u01(rng) >= p.write_mix) continue;
            WriteOp op;
            op.t = t;
            op.db = db;
            op.table = pick_table(cfg.topology, rng);
            std::int64_t n = uniform_int(rng, p.files_per_write_min, p.files_per_write_max);
            op.file_sizes.reserve(n);
            for (std::int64_t i = 0; i < n; ++i)
                op.file_sizes.push_back(
                    log_uniform(rng, p.file_size_min_bytes, p.file_size_max_bytes));
            ops.push_back(std::move(op));
        }
    }
    std::stable_sort(ops.begin(), ops.end(),
                     [](const WriteOp& a, const WriteOp& b) { return a.t < b.t; });
    return ops;
}

// ---------------------------------------------------------------------------
// Event loop
// ---------------------------------------------------------------------------

enum class EventKind { MetricsTick = 0, TaskCompletion = 1, Trigger = 2, Write = 3, Retry = 4 };

int event_priority(EventKind k) {
    switch (k) {
        case EventKind::MetricsTick: return 0;
        case EventKind::TaskCompletion: return 1;
        case EventKind::Trigger: return 2;
        case EventKind::Write:
        case EventKind::Retry: return 3;
    }
    return 3;
}

struct Event {
    std::int64_t t = 0;
    int prio = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Write;
    std::size_t index = 0;  // write index or task index

    friend bool operator>(const Event& a, const Event& b) {
        return std::tie(a.t, a.prio, a.seq) > std::tie(b.t, b.prio, b.seq);
    }
};

struct RunningTask {
    CompactionTask task;
    std::vector<std::pair<std::string, std::int64_t>> inputs;  // (file_id, size)
    std::int64_t input_bytes = 0;
    std::int64_t end_t = 0;
    bool live = false;
    bool finished = false;
    std::size_t run_index = 0;
};

struct CompactionRun {
    std::vector<std::vector<std::size_t>> waves;  // global task indexes
    std::size_t next_wave = 0;
    std::int64_t live_remaining = 0;
};

class Simulation {
public:
    explicit Simulation(const SimConfig& cfg)
        : cfg_(cfg),
          rng_(cfg.seed),
          conflict_rng_(cfg.seed ^ 0x9e3779b97f4a7c15ull),
          registry_(default_trait_registry()) {}

    SimResult run();

private:
    TableState& table_at(std::int64_t db, std::int64_t table) {
        return state_.databases[db].tables[table];
    }
    DatabaseState& db_at(std::int64_t db) { return state_.databases[db]; }

    TableState& table_of(const TableId& id) {
        for (auto& db : state_.databases)
            for (auto& table : db.tables)
                if (table.table_id == id) return table;
        throw EngineError("simulated task references unknown table '" + id.str() + "'");
    }

    // A task is stale when any of its captured input files no longer exists
    // (another run rewrote the scope between capture and start).
    bool inputs_still_present(const RunningTask& rt) {
        const TableState& table = table_of(rt.task.scope.table_id);
        std::set<std::string> current;
        for (const auto& [key, files] : table.partitions) {
            if (rt.task.scope.kind == ScopeKind::Partition &&
                key != rt.task.scope.partition_key.value())
                continue;
            for (const auto& f : files) current.insert(f.file_id);
        }
        for (const auto& [id, size] : rt.inputs)
            if (!current.count(id)) return false;
        return true;
    }

    std::int64_t live_bucket_index(std::int64_t t) const {
        return cfg_.topology.initial_partitions_per_table +
               t / cfg_.topology.partition_bucket_seconds;
    }
    std::string bucket_key(std::int64_t index) const { return zero_padded("b", index, 6); }

    std::string write_partition_key(const WriteOp& op) {
        const TableState& table = table_at(op.db, op.table);
        if (!table.is_partitioned) return kDefaultPartitionKey;
        return bucket_key(live_bucket_index(op.t));
    }

    std::string next_file_id() { return zero_padded("f", file_serial_++, 10); }

    void build_initial_state();
    void push_event(std::int64_t t, EventKind kind, std::size_t index);
    void log_event(std::int64_t t, const char* kind, json detail);

    void handle_metrics_tick(std::int64_t t);
    void handle_write(std::size_t write_index, std::int64_t t, bool is_retry);
    void commit_write(const WriteOp& op, std::int64_t commit_t, bool retried);
    void handle_trigger(std::int64_t t);
    void handle_completion(std::size_t task_index, std::int64_t t);
    void abort_task(std::size_t task_index, std::int64_t t);
    void start_wave(std::size_t run_index, std::int64_t t);
    void launch_run(const CompactionPlan& plan, const DispatchSchedule& schedule,
                    const std::vector<Candidate>& kept, std::int64_t t);
    void finish_task_bookkeeping(std::size_t task_index, std::int64_t t);
    bool table_busy(const TableId& id) const;
    void maybe_post_write_compaction(const WriteOp& op, std::int64_t t);

    const SimConfig& cfg_;
    std::mt19937_64 rng_;
    std::mt19937_64 conflict_rng_;
    TraitRegistry registry_;

    SnapshotDocument state_;
    std::vector<WriteOp> writes_;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
    std::uint64_t seq_ = 0;
    std::int64_t file_serial_ = 0;

    std::int64_t exec_target_ = kDefaultTargetFileSizeBytes;
    double exec_bytes_per_second_ = 0.0;

    std::vector<RunningTask> tasks_;
    std::vector<CompactionRun> runs_;
    std::map<TableId, std::vector<std::size_t>> inflight_;
    std::optional<WriteHook> hook_;

    // totals and per-interval accumulators
    std::int64_t total_files_ = 0;
    std::int64_t small_files_ = 0;
    std::int64_t acc_added_ = 0;
    std::int64_t acc_removed_ = 0;
    double acc_gbhr_ = 0.0;
    std::int64_t acc_client_ = 0;
    std::int64_t acc_cluster_ = 0;
    std::set<TableId> acc_tables_compacted_;

    SimResult result_;
};

void Simulation::build_initial_state() {
    state_.format_version = kSnapshotFormatVersion;
    state_.captured_at = cfg_.start_epoch;
    const TopologySpec& topo = cfg_.topology;
    for (std::int64_t db = 0; db < cfg_.database_count; ++db) {
        const PatternSpec& pattern = cfg_.patterns[db % cfg_.patterns.size()];
        DatabaseState d;
        d.database_id = zero_padded("db", db, 3);
        d.total_quota = topo.total_quota_per_database;

        auto add_files = [&](std::vector<FileRecord>& slot, const std::string& key,
                             std::int64_t count) {
            for (std::int64_t i = 0; i < count; ++i) {
                FileRecord f;
                f.file_id = next_file_id();
                f.size_bytes =
                    log_uniform(rng_, pattern.file_size_min_bytes, pattern.file_size_max_bytes);
                f.created_at = cfg_.start_epoch - 3'600;
                f.partition_key = key;
                slot.push_back(std::move(f));
            }
        };

        for (std::int64_t i = 0; i < topo.partitioned_tables_per_database; ++i) {
            TableState t;
            t.table_id = {d.database_id, zero_padded("events", i, 2)};
            t.created_at = cfg_.start_epoch - topo.initial_table_age_seconds;
            t.last_write_at = cfg_.start_epoch - 3'600;
            t.is_partitioned = true;
            for (std::int64_t b = 0; b < topo.initial_partitions_per_table; ++b) {
                std::string key = bucket_key(b);
                add_files(t.partitions[key], key, topo.initial_files_per_partition);
            }
            d.tables.push_back(std::move(t));
        }
        for (std::int64_t i = 0; i < topo.unpartitioned_tables_per_database; ++i) {
            TableState t;
            t.table_id = {d.database_id, zero_padded("dim", i, 2)};
            t.created_at = cfg_.start_epoch - topo.initial_table_age_seconds;
            t.last_write_at = cfg_.start_epoch - 3'600;
            t.is_partitioned = false;
            add_files(t.partitions[kDefaultPartitionKey], kDefaultPartitionKey,
                      topo.initial_files_per_unpartitioned_table);
            d.tables.push_back(std::move(t));
        }

        std::int64_t files = 0;
        for (const auto& t : d.tables) files += t.file_count();
        d.used_quota = files;
        state_.databases.push_back(std::move(d));
    }

    for (const auto& db : state_.databases) {
        for (const auto& table : db.tables) {
            for (const auto& [key, files] : table.partitions) {
                for (const auto& f : files) {
                    ++total_files_;
                    if (f.size_bytes < exec_target_) ++small_files_;
                }
            }
        }
    }
}

void Simulation::push_event(std::int64_t t, EventKind kind, std::size_t index) {
    queue_.push({t, event_priority(kind), seq_++, kind, index});
}

void Simulation::log_event(std::int64_t t, const char* kind, json detail) {
    result_.events.push_back({t, kind, std::move(detail)});
}

bool Simulation::table_busy(const TableId& id) const {
    auto it = inflight_.find(id);
    if (it == inflight_.end()) return false;
    for (std::size_t idx : it->second)
        if (tasks_[idx].live) return true;
    return false;
}

void Simulation::handle_metrics_tick(std::int64_t t) {
    MetricsRow row;
    row.t = t;
    row.total_files = total_files_;
    row.small_files = small_files_;
    row.files_added = acc_added_;
    row.files_removed = acc_removed_;
    row.compaction_gbhr = acc_gbhr_;
    row.client_conflicts = acc_client_;
    row.cluster_conflicts = acc_cluster_;
    row.tables_compacted = static_cast<std::int64_t>(acc_tables_compacted_.size());
    result_.metrics.push_back(row);

    acc_added_ = 0;
    acc_removed_ = 0;
    acc_gbhr_ = 0.0;
    acc_client_ = 0;
    acc_cluster_ = 0;
    acc_tables_compacted_.clear();
}

void Simulation::commit_write(const WriteOp& op, std::int64_t commit_t, bool retried) {
    TableState& table = table_at(op.db, op.table);
    std::string key = write_partition_key(op);
    auto& slot = table.partitions[key];
    std::int64_t bytes = 0;
    for (std::int64_t size : op.file_sizes) {
        FileRecord f;
        f.file_id = next_file_id();
        f.size_bytes = size;
        f.created_at = cfg_.start_epoch + commit_t;
        f.partition_key = key;
        slot.push_back(std::move(f));
        bytes += size;
        ++total_files_;
        if (size < exec_target_) ++small_files_;
    }
    table.last_write_at = cfg_.start_epoch + commit_t;
    db_at(op.db).used_quota += static_cast<std::int64_t>(op.file_sizes.size());
    acc_added_ += static_cast<std::int64_t>(op.file_sizes.size());

    json detail;
    detail["db"] = table.table_id.database;
    detail["table"] = table.table_id.name;
    if (table.is_partitioned) detail["partition"] = key;
    detail["files"] = op.file_sizes.size();
    detail["bytes"] = bytes;
    if (retried) detail["retried"] = true;
    log_event(commit_t, "write", std::move(detail));
}

void Simulation::handle_write(std::size_t write_index, std::int64_t t, bool is_retry) {
    const WriteOp& op = writes_[write_index];
    if (is_retry) {
        commit_write(op, t, true);
        maybe_post_write_compaction(op, t);
        return;
    }

    const TableId& tid = table_at(op.db, op.table).table_id;
    bool overlap = table_busy(tid);
    if (overlap) {
        // Cluster side first: the write's commit invalidates any task
        // rewriting the same scope.
        if (cfg_.conflict.cluster_abort_on_overlap) {
            std::string write_key = write_partition_key(op);
            auto& slots = inflight_[tid];
            for (std::size_t idx : std::vector<std::size_t>(slots.begin(), slots.end())) {
                RunningTask& rt = tasks_[idx];
                if (!rt.live) continue;
                bool covers = rt.task.scope.kind == ScopeKind::Table ||
                              rt.task.scope.partition_key.value() == write_key;
                if (covers) abort_task(idx, t);
            }
        }

        double p = cfg_.conflict.client_conflict_prob_per_overlap;
        bool client_conflict = p >= 1.0 || (p > 0.0 && u01(conflict_rng_) < p);
        if (client_conflict) {
            ++acc_client_;
            ++result_.total_client_conflicts;
            std::int64_t retry_t = t + cfg_.conflict.client_retry_backoff_seconds;
            json detail;
            detail["db"] = tid.database;
            detail["table"] = tid.name;
            detail["retry_at"] = retry_t;
            log_event(t, "client_conflict", std::move(detail));
            push_event(retry_t, EventKind::Retry, write_index);
            return;
        }
    }
    commit_write(op, t, false);
    maybe_post_write_compaction(op, t);
}

void Simulation::finish_task_bookkeeping(std::size_t task_index, std::int64_t t) {
    RunningTask& rt = tasks_[task_index];
    rt.live = false;
    rt.finished = true;
    auto& slots = inflight_[rt.task.scope.table_id];
    slots.erase(std::remove(slots.begin(), slots.end(), task_index), slots.end());

    CompactionRun& run = runs_[rt.run_index];
    if (--run.live_remaining == 0 && run.next_wave < run.waves.size()) start_wave(rt.run_index, t);
}

void Simulation::abort_task(std::size_t task_index, std::int64_t t) {
    RunningTask& rt = tasks_[task_index];
    ++acc_cluster_;
    ++result_.total_cluster_conflicts;
    json detail;
    detail["candidate"] = rt.task.candidate_id;
    log_event(t, "task_abort", std::move(detail));
    finish_task_bookkeeping(task_index, t);
}

void Simulation::handle_completion(std::size_t task_index, std::int64_t t) {
    RunningTask& rt = tasks_[task_index];
    if (rt.finished) return;  // aborted earlier

    // Replace the captured input files with packed output files.
    TableState& table = table_of(rt.task.scope.table_id);
    DatabaseState& db = [&]() -> DatabaseState& {
        for (auto& d : state_.databases)
            if (d.database_id == rt.task.scope.table_id.database) return d;
        throw EngineError("simulated task lost its database");
    }();

    std::set<std::string> input_ids;
    std::int64_t removed_small = 0;
    for (const auto& [id, size] : rt.inputs) {
        input_ids.insert(id);
        if (size < exec_target_) ++removed_small;
    }
    std::int64_t removed = 0;
    for (auto& [key, files] : table.partitions) {
        auto pred = [&](const FileRecord& f) { return input_ids.count(f.file_id) > 0; };
        removed += std::count_if(files.begin(), files.end(), pred);
        files.erase(std::remove_if(files.begin(), files.end(), pred), files.end());
    }

    std::int64_t bytes = rt.input_bytes;
    std::int64_t n_out = bytes > 0 ? (bytes + exec_target_ - 1) / exec_target_ : 0;
    std::int64_t out_small = 0;
    if (n_out > 0) {
        std::string out_key = rt.task.scope.kind == ScopeKind::Partition
                                  ? rt.task.scope.partition_key.value()
                                  : table.partitions.begin()->first;
        auto& out_slot = table.partitions[out_key];
        for (std::int64_t i = 0; i < n_out; ++i) {
            FileRecord f;
            f.file_id = next_file_id();
            f.size_bytes = i + 1 < n_out ? exec_target_ : bytes - (n_out - 1) * exec_target_;
            f.created_at = cfg_.start_epoch + t;
            f.partition_key = out_key;
            if (f.size_bytes < exec_target_) ++out_small;
            out_slot.push_back(std::move(f));
        }
    }

    total_files_ += n_out - removed;
    small_files_ += out_small - removed_small;
    db.used_quota += n_out - removed;
    acc_added_ += n_out;
    acc_removed_ += removed;
    acc_tables_compacted_.insert(table.table_id);

    json detail;
    detail["candidate"] = rt.task.candidate_id;
    detail["files_removed"] = removed;
    detail["files_added"] = n_out;
    detail["bytes_in"] = bytes;
    detail["bytes_out"] = bytes;  // conserved exactly
    log_event(t, "task_done", std::move(detail));

    finish_task_bookkeeping(task_index, t);
}

void Simulation::start_wave(std::size_t run_index, std::int64_t t) {
    CompactionRun& run = runs_[run_index];
    while (run.next_wave < run.waves.size()) {
        const auto& wave = run.waves[run.next_wave++];
        std::int64_t started = 0;
        for (std::size_t idx : wave) {
            RunningTask& rt = tasks_[idx];
            // Overlapping runs: never execute two tasks on one table, and
            // never execute against inputs another run already rewrote.
            if (table_busy(rt.task.scope.table_id) || !inputs_still_present(rt)) {
                rt.finished = true;
                json detail;
                detail["candidate"] = rt.task.candidate_id;
                log_event(t, "task_skipped", std::move(detail));
                continue;
            }
            rt.live = true;
            auto duration = static_cast<std::int64_t>(
                std::ceil(static_cast<double>(rt.input_bytes) / exec_bytes_per_second_));
            rt.end_t = t + std::max<std::int64_t>(1, duration);
            inflight_[rt.task.scope.table_id].push_back(idx);
            acc_gbhr_ += rt.task.estimated_gbhr;
            result_.total_gbhr += rt.task.estimated_gbhr;
            json detail;
            detail["candidate"] = rt.task.candidate_id;
            detail["ends_at"] = rt.end_t;
            log_event(t, "task_start", std::move(detail));
            push_event(rt.end_t, EventKind::TaskCompletion, idx);
            ++started;
        }
        run.live_remaining = started;
        if (started > 0) break;
    }
}

void Simulation::launch_run(const CompactionPlan& plan, const DispatchSchedule& schedule,
                            const std::vector<Candidate>& kept, std::int64_t t) {
    if (plan.tasks.empty()) return;

    std::map<std::string, const Candidate*> by_id;
    for (const auto& c : kept) by_id[c.candidate_id] = &c;

    CompactionRun run;
    std::size_t run_index = runs_.size();
    for (const auto& wave : schedule.waves) {
        std::vector<std::size_t> indexes;
        for (const auto& task : wave) {
            RunningTask rt;
            rt.task = task;
            rt.run_index = run_index;
            const Candidate* c = by_id.at(task.candidate_id);
            rt.inputs.reserve(c->files.size());
            for (const auto& f : c->files) {
                rt.inputs.emplace_back(f.file_id, f.size_bytes);
                rt.input_bytes += f.size_bytes;
            }
            indexes.push_back(tasks_.size());
            tasks_.push_back(std::move(rt));
        }
        run.waves.push_back(std::move(indexes));
    }
    runs_.push_back(std::move(run));
    start_wave(run_index, t);
}

void Simulation::handle_trigger(std::int64_t t) {
    const CompactionSetup& setup = *cfg_.compaction;
    Timestamp now = cfg_.start_epoch + t;
    for (const auto& window : setup.trigger.blackout_windows) {
        if (window.contains(now)) {
            log_event(t, "trigger_blackout", json::object());
            return;
        }
    }

    PipelineResult res = run_pipeline(state_, setup.engine, now, &registry_);

    // Skip tasks whose table is still being rewritten by a previous run.
    CompactionPlan executable;
    executable.generated_at = res.plan.generated_at;
    std::int64_t skipped = 0;
    for (const auto& task : res.plan.tasks) {
        if (table_busy(task.scope.table_id)) {
            ++skipped;
            continue;
        }
        executable.total_estimated_gbhr += task.estimated_gbhr;
        executable.tasks.push_back(task);
    }
    DispatchSchedule schedule = build_schedule(executable, setup.engine.max_parallel);

    json detail;
    detail["planned_tasks"] = res.plan.tasks.size();
    detail["excluded"] = res.plan.excluded.size();
    detail["skipped_inflight"] = skipped;
    detail["estimated_gbhr"] = executable.total_estimated_gbhr;
    log_event(t, "trigger", std::move(detail));

    launch_run(executable, schedule, res.kept, t);
}

void Simulation::maybe_post_write_compaction(const WriteOp& op, std::int64_t t) {
    if (!hook_) return;
    const CompactionSetup& setup = *cfg_.compaction;
    const TableId& tid = table_at(op.db, op.table).table_id;
    HookAction action =
        hook_->on_write({tid, cfg_.start_epoch + t}, state_, setup.engine, registry_);
    if (action.kind == HookActionKind::RecomputeTraits) {
        json detail;
        detail["table"] = tid.str();
        log_event(t, "hook_recompute", std::move(detail));
        return;
    }
    if (action.kind != HookActionKind::TriggerCompaction) return;
    if (table_busy(tid)) return;  // already being rewritten

    const Candidate& candidate = *action.candidate;
    CompactionPlan plan;
    plan.generated_at = cfg_.start_epoch + t;
    CompactionTask task;
    task.candidate_id = candidate.candidate_id;
    task.scope = candidate.scope;
    task.estimated_gbhr = compute_cost_gbhr(candidate, setup.engine.executor_memory_gb,
                                            setup.engine.rewrite_bytes_per_hour);
    plan.tasks.push_back(task);
    plan.total_estimated_gbhr = task.estimated_gbhr;
    DispatchSchedule schedule = build_schedule(plan, setup.engine.max_parallel);

    json detail;
    detail["table"] = tid.str();
    detail["candidate"] = candidate.candidate_id;
    log_event(t, "hook_trigger", std::move(detail));
    launch_run(plan, schedule, {candidate}, t);
}

SimResult Simulation::run() {
    exec_target_ = cfg_.execution.target_file_size_bytes.value_or(
        cfg_.compaction ? cfg_.compaction->engine.target_file_size_bytes
                        : kDefaultTargetFileSizeBytes);
    exec_bytes_per_second_ = cfg_.execution.rewrite_bytes_per_hour / 3'600.0;

    build_initial_state();
    writes_ = generate_workload(cfg_, rng_);

    for (std::int64_t t = 0; t <= cfg_.duration_seconds; t += cfg_.metrics_interval_seconds)
        push_event(t, EventKind::MetricsTick, 0);
    if (cfg_.duration_seconds % cfg_.metrics_interval_seconds != 0)
        push_event(cfg_.duration_seconds, EventKind::MetricsTick, 0);

    if (cfg_.compaction) {
        if (cfg_.compaction->trigger.kind == TriggerMode::Kind::Periodic) {
            for (std::int64_t t = cfg_.compaction->trigger.interval_seconds;
                 t < cfg_.duration_seconds; t += cfg_.compaction->trigger.interval_seconds)
                push_event(t, EventKind::Trigger, 0);
        } else {
            hook_.emplace(cfg_.compaction->trigger.debounce_seconds,
                          cfg_.compaction->trigger.thresholds);
        }
    }
    for (std::size_t i = 0; i < writes_.size(); ++i)
        push_event(writes_[i].t, EventKind::Write, i);

    while (!queue_.empty()) {
        Event e = queue_.top();
        queue_.pop();
        if (e.t > cfg_.duration_seconds) continue;
        if (e.t == cfg_.duration_seconds && e.kind != EventKind::MetricsTick) continue;
        switch (e.kind) {
            case EventKind::MetricsTick: handle_metrics_tick(e.t); break;
            case EventKind::TaskCompletion: handle_completion(e.index, e.t); break;
            case EventKind::Trigger: handle_trigger(e.t); break;
            case EventKind::Write: handle_write(e.index, e.t, false); break;
            case EventKind::Retry: handle_write(e.index, e.t, true); break;
        }
    }

    result_.final_snapshot = state_;
    result_.final_snapshot.captured_at = cfg_.start_epoch + cfg_.duration_seconds;
    canonicalize_snapshot(result_.final_snapshot);
    return std::move(result_);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config validation
// ---------------------------------------------------------------------------

void PatternSpec::validate() const {
    if (base_rate < 0) throw ConfigError("pattern base_rate must be >= 0");
    if (kind == Kind::Sinusoidal) {
        if (period_seconds <= 0) throw ConfigError("sinusoidal period_seconds must be > 0");
        if (amplitude < 0) throw ConfigError("sinusoidal amplitude must be >= 0");
    }
    if (kind == Kind::ShortBurst || kind == Kind::LargeBurst) {
        if (burst_seconds <= 0 || spacing_seconds <= 0)
            throw ConfigError("burst patterns need burst_seconds > 0 and spacing_seconds > 0");
        if (burst_seconds > spacing_seconds)
            throw ConfigError("burst_seconds must not exceed spacing_seconds");
    }
    if (write_mix < 0.0 || write_mix > 1.0) throw ConfigError("write_mix must be in [0, 1]");
    if (files_per_write_min < 1 || files_per_write_max < files_per_write_min)
        throw ConfigError("files_per_write bounds must satisfy 1 <= min <= max");
    if (file_size_min_bytes < 1 || file_size_max_bytes < file_size_min_bytes)
        throw ConfigError("file_size bounds must satisfy 1 <= min <= max");
}

void TopologySpec::validate() const {
    if (partitioned_tables_per_database < 0 || unpartitioned_tables_per_database < 0)
        throw ConfigError("table counts must be >= 0");
    if (partitioned_tables_per_database + unpartitioned_tables_per_database == 0)
        throw ConfigError("each database needs at least one table");
    if (initial_partitions_per_table < 0 || initial_files_per_partition < 0 ||
        initial_files_per_unpartitioned_table < 0)
        throw ConfigError("initial file counts must be >= 0");
    if (partition_bucket_seconds <= 0) throw ConfigError("partition_bucket_seconds must be > 0");
    if (partitioned_write_weight < 0 || unpartitioned_write_weight < 0)
        throw ConfigError("write weights must be >= 0");
    if (total_quota_per_database <= 0) throw ConfigError("total_quota_per_database must be > 0");
    if (initial_table_age_seconds < 0) throw ConfigError("initial_table_age_seconds must be >= 0");
}

void ConflictModel::validate() const {
    if (client_conflict_prob_per_overlap < 0.0 || client_conflict_prob_per_overlap > 1.0)
        throw ConfigError("client_conflict_prob_per_overlap must be in [0, 1]");
    if (client_retry_backoff_seconds < 0)
        throw ConfigError("client_retry_backoff_seconds must be >= 0");
}

void ExecutionModel::validate() const {
    if (rewrite_bytes_per_hour <= 0) throw ConfigError("execution rewrite_bytes_per_hour must be > 0");
    if (target_file_size_bytes && *target_file_size_bytes <= 0)
        throw ConfigError("execution target_file_size_bytes must be > 0");
}

void SimConfig::validate() const {
    if (duration_seconds <= 0) throw ConfigError("duration_seconds must be > 0");
    if (metrics_interval_seconds <= 0) throw ConfigError("metrics_interval_seconds must be > 0");
    if (database_count <= 0) throw ConfigError("database_count must be > 0");
    if (patterns.empty()) throw ConfigError("at least one workload pattern is required");
    for (const auto& p : patterns) p.validate();
    topology.validate();
    conflict.validate();
    execution.validate();
    if (compaction) {
        compaction->engine.validate();
        compaction->trigger.validate();
    }
    std::set<std::string> names;
    for (const auto& s : strategies) {
        if (s.name.empty()) throw ConfigError("strategy names must be non-empty");
        if (!names.insert(s.name).second)
            throw ConfigError("duplicate strategy name '" + s.name + "'");
        if (s.compaction) {
            s.compaction->engine.validate();
            s.compaction->trigger.validate();
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

SimResult run_simulation(const SimConfig& config) {
    config.validate();
    Simulation sim(config);
    return sim.run();
}

std::vector<StrategyResult> compare_strategies(const SimConfig& base) {
    base.validate();
    if (base.strategies.empty())
        throw ConfigError("compare requires at least one strategy");
    std::vector<StrategyResult> results;
    for (const auto& strategy : base.strategies) {
        SimConfig variant = base;
        variant.compaction = strategy.compaction;
        variant.strategies.clear();
        results.push_back({strategy.name, run_simulation(variant)});
    }
    return results;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "t,total_files,small_files,files_added,files_removed,compaction_gbhr,"
           "client_conflicts,cluster_conflicts,tables_compacted\n";
    char gbhr[64];
    for (const auto& r : rows) {
        std::snprintf(gbhr, sizeof(gbhr), "%.6f", r.compaction_gbhr);
        out << r.t << ',' << r.total_files << ',' << r.small_files << ',' << r.files_added << ','
            << r.files_removed << ',' << gbhr << ',' << r.client_conflicts << ','
            << r.cluster_conflicts << ',' << r.tables_compacted << '\n';
    }
    return out.str();
}

std::string events_to_jsonl(const std::vector<SimEventRecord>& events) {
    std::ostringstream out;
    for (const auto& e : events) {
        json line;
        line["t"] = e.t;
        line["kind"] = e.kind;
        line["detail"] = e.detail;
        out << line.dump() << '\n';
    }
    return out.str();
}

}  // namespace lakecomp
