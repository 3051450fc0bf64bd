#pragma once
// Act phase: turning a plan into dispatch waves and deciding when the
// pipeline runs at all. Tasks touching the same table are never placed in
// one wave; partition tasks of a table therefore execute sequentially while
// distinct tables proceed in parallel.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lakecomp/snapshot.hpp"
#include "lakecomp/traits.hpp"
#include "lakecomp/types.hpp"

namespace lakecomp {

struct BlackoutWindow {
    // Seconds of day, [start, end). A window wrapping midnight has end < start.
    std::int64_t start_second_of_day = 0;
    std::int64_t end_second_of_day = 0;

    bool contains(Timestamp t) const;
};

struct TriggerMode {
    enum class Kind { Periodic, PostWrite };
    Kind kind = Kind::Periodic;
    std::int64_t interval_seconds = 86'400;       // Periodic
    std::int64_t debounce_seconds = 300;          // PostWrite
    std::map<std::string, double> thresholds;     // PostWrite trigger traits
    std::vector<BlackoutWindow> blackout_windows;

    void validate() const;
};

struct DispatchSchedule {
    // Tasks within a wave may run concurrently; waves run in order.
    std::vector<std::vector<CompactionTask>> waves;
};

// Greedy wave assignment in plan order: a task joins the earliest wave with
// no same-table task and fewer than max_parallel members.
DispatchSchedule build_schedule(const CompactionPlan& plan, std::int64_t max_parallel);

// True iff the interval has elapsed (or there was no previous run) and `now`
// is outside every blackout window.
bool periodic_tick(Timestamp now, std::optional<Timestamp> last_run, std::int64_t interval_seconds,
                   const std::vector<BlackoutWindow>& blackout_windows = {});

enum class HookActionKind { None, RecomputeTraits, TriggerCompaction };

struct HookAction {
    HookActionKind kind = HookActionKind::None;
    std::optional<Candidate> candidate;  // set for TriggerCompaction
};

struct WriteEvent {
    TableId table_id;
    Timestamp now = 0;
};

// Optimize-after-write hook. Debounced per table: within debounce_seconds of
// the previous firing for the same table the hook does nothing. Otherwise it
// recomputes the table's traits and triggers compaction when any configured
// threshold is met. Not safe for unsynchronized concurrent use.
class WriteHook {
public:
    WriteHook(std::int64_t debounce_seconds, std::map<std::string, double> thresholds);

    // Throws UnknownTableError when the event's table is not in the snapshot.
    HookAction on_write(const WriteEvent& event, const SnapshotDocument& state,
                        const EngineConfig& config, const TraitRegistry& registry);

private:
    std::int64_t debounce_seconds_;
    std::map<std::string, double> thresholds_;
    std::map<TableId, Timestamp> last_fired_;
};

struct TaskOutcome {
    bool success = false;
    Timestamp completed_at = 0;
};

// Observe-phase statistics cache fed back from executed tasks. A successful
// task invalidates its scope's entry and recomputes it from the new table
// state; failures leave the cache untouched.
class ObservationCache {
public:
    void put(const std::string& candidate_id, const CandidateStats& stats);
    std::optional<CandidateStats> lookup(const std::string& candidate_id) const;
    void feedback(const CompactionTask& task, const TaskOutcome& outcome,
                  const TableState& post_state, const EngineConfig& config);
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, CandidateStats> entries_;
};

}  // namespace lakecomp
