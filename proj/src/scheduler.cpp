#include "lakecomp/scheduler.hpp"

#include <algorithm>

#include "lakecomp/candidates.hpp"
#include "lakecomp/errors.hpp"

namespace lakecomp {

bool BlackoutWindow::contains(Timestamp t) const {
    std::int64_t day_second = ((t % 86'400) + 86'400) % 86'400;
    if (start_second_of_day <= end_second_of_day)
        return day_second >= start_second_of_day && day_second < end_second_of_day;
    // wraps midnight
    return day_second >= start_second_of_day || day_second < end_second_of_day;
}

void TriggerMode::validate() const {
    if (kind == Kind::Periodic && interval_seconds <= 0)
        throw ConfigError("periodic trigger interval_seconds must be > 0");
    if (kind == Kind::PostWrite && debounce_seconds <= 0)
        throw ConfigError("post-write trigger debounce_seconds must be > 0");
}

DispatchSchedule build_schedule(const CompactionPlan& plan, std::int64_t max_parallel) {
    if (max_parallel <= 0) throw ConfigError("max_parallel must be > 0");
    DispatchSchedule schedule;
    for (const auto& task : plan.tasks) {
        bool placed = false;
        for (auto& wave : schedule.waves) {
            if (static_cast<std::int64_t>(wave.size()) >= max_parallel) continue;
            bool same_table = std::any_of(wave.begin(), wave.end(), [&](const CompactionTask& t) {
                return t.scope.table_id == task.scope.table_id;
            });
            if (same_table) continue;
            wave.push_back(task);
            placed = true;
            break;
        }
        if (!placed) schedule.waves.push_back({task});
    }
    return schedule;
}

bool periodic_tick(Timestamp now, std::optional<Timestamp> last_run, std::int64_t interval_seconds,
                   const std::vector<BlackoutWindow>& blackout_windows) {
    if (interval_seconds <= 0) throw ConfigError("interval_seconds must be > 0");
    for (const auto& window : blackout_windows)
        if (window.contains(now)) return false;
    if (!last_run) return true;
    return now - *last_run >= interval_seconds;
}

WriteHook::WriteHook(std::int64_t debounce_seconds, std::map<std::string, double> thresholds)
    : debounce_seconds_(debounce_seconds), thresholds_(std::move(thresholds)) {
    if (debounce_seconds_ <= 0) throw ConfigError("debounce_seconds must be > 0");
}

HookAction WriteHook::on_write(const WriteEvent& event, const SnapshotDocument& state,
                               const EngineConfig& config, const TraitRegistry& registry) {
    const TableState* table = state.find_table(event.table_id);
    if (!table) throw UnknownTableError("unknown table '" + event.table_id.str() + "'");

    auto it = last_fired_.find(event.table_id);
    if (it != last_fired_.end() && event.now - it->second < debounce_seconds_)
        return {HookActionKind::None, std::nullopt};
    last_fired_[event.table_id] = event.now;

    CandidateScope scope{ScopeKind::Table, event.table_id, std::nullopt};
    Candidate candidate = make_candidate(scope, *table, config);
    std::vector<TraitVector> traits = compute_traits({candidate}, config, registry);

    for (const auto& [name, threshold] : thresholds_) {
        if (traits.front().at(name) >= threshold)
            return {HookActionKind::TriggerCompaction, std::move(candidate)};
    }
    return {HookActionKind::RecomputeTraits, std::nullopt};
}

void ObservationCache::put(const std::string& candidate_id, const CandidateStats& stats) {
    entries_[candidate_id] = stats;
}

std::optional<CandidateStats> ObservationCache::lookup(const std::string& candidate_id) const {
    auto it = entries_.find(candidate_id);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ObservationCache::feedback(const CompactionTask& task, const TaskOutcome& outcome,
                                const TableState& post_state, const EngineConfig& config) {
    if (!outcome.success) return;
    entries_.erase(task.candidate_id);
    Candidate fresh = make_candidate(task.scope, post_state, config);
    entries_[task.candidate_id] = fresh.stats;
}

}  // namespace lakecomp
