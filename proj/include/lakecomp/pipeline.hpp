#pragma once
// End-to-end decision pipeline: candidates -> filters -> traits -> ranking ->
// plan -> dispatch schedule, plus the per-candidate explanation surface and
// canonical JSON forms of plans and schedules. Deterministic: identical
// inputs produce byte-identical serialized output.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakecomp/candidates.hpp"
#include "lakecomp/ranker.hpp"
#include "lakecomp/scheduler.hpp"
#include "lakecomp/snapshot.hpp"
#include "lakecomp/traits.hpp"

namespace lakecomp {

struct PipelineResult {
    // Full pre-filter pool, sorted by candidate_id.
    std::vector<Candidate> pool;
    std::vector<DroppedCandidate> dropped;
    std::vector<Candidate> kept;
    // Trait vectors for `kept`, same order.
    std::vector<TraitVector> raw_traits;
    std::vector<TraitVector> normalized_traits;
    // Scored candidates in kept order (MoopConstrained mode only).
    std::vector<ScoredCandidate> scored;
    CompactionPlan plan;
    DispatchSchedule schedule;
};

// Runs the whole pipeline against a snapshot. When an observation cache is
// given, cached statistics override the freshly computed ones for filtering
// (the feedback loop path). The registry defaults to the built-in traits.
PipelineResult run_pipeline(const SnapshotDocument& snapshot, const EngineConfig& config,
                            Timestamp now, const TraitRegistry* registry = nullptr,
                            const ObservationCache* cache = nullptr);

nlohmann::json scope_to_json(const CandidateScope& scope);
nlohmann::json plan_to_json(const CompactionPlan& plan);
nlohmann::json schedule_to_json(const DispatchSchedule& schedule);

// Canonical form: sorted keys, 2-space indent, trailing newline.
std::string to_canonical_string(const nlohmann::json& j);

// Everything known about one candidate: stats, filter outcome, raw and
// normalized traits, weighted contributions, score and selection status.
// Throws UnknownCandidateError if the id is not in the generated pool.
nlohmann::json explain_candidate(const PipelineResult& result, const EngineConfig& config,
                                 const std::string& candidate_id);

// Human-readable rendering of an explain report.
std::string explain_to_text(const nlohmann::json& report);

}  // namespace lakecomp
